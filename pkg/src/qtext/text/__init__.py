from .corpus import (
    Document,
    LabeledDataset,
    load_imdb,
    load_lambeq,
    load_lambeq_split,
    sample_subset,
    signed,
    tokenize,
)
from .embeddings import (
    EmbeddingTable,
    load_embeddings_text,
    save_embeddings_text,
    sentence_vector,
    train_embeddings,
)
from .qbow import QBowModel, qbow_classify, qbow_train
