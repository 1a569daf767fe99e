"""
Similarity through shared neighbours
====================================

Three short documents. The first and the last share no word, so a plain
bag-of-words kernel calls them unrelated. The diffusion kernel links them
through "dark" -> "mold", a chain of two co-occurrences.
"""
import numpy as np

from dkpca import PipelineConfig, corpus_from_pairs
from dkpca.corpus import build_doc_term_matrix, build_vocabulary, load_stopwords
from dkpca.evaluation import build_kernel_for
from dkpca.kernels import cooccurrence_matrix, diffusion_semantic_matrix

corpus = corpus_from_pairs("today", [
    ("a", "Today is very cold and dark"),
    ("b", "Dark rooms have generally have mold"),
    ("b", "Mold can cause sickness"),
])

stop = load_stopwords()
vocab = build_vocabulary(corpus, stop)
D, B = build_doc_term_matrix(corpus, vocab, stop)
print("terms:", vocab.terms)
print(B.values)

# term co-occurrence counts and their square: cold reaches mold in two hops
G = cooccurrence_matrix(B)
cold, mold = vocab.index["cold"], vocab.index["mold"]
print("G[cold, mold]  =", G.values[cold, mold])
print("G²[cold, mold] =", (G.values @ G.values)[cold, mold])

S = diffusion_semantic_matrix(G, lam=0.5, steps=2)
print("S[cold, mold]  =", S.values[cold, mold])

np.set_printoptions(precision=4, suppress=True)
print("linear kernel\n", build_kernel_for(corpus, PipelineConfig(kernel="linear")).values)
print("diffusion kernel\n", build_kernel_for(corpus, PipelineConfig(kernel="diffusion", lam=0.5, steps=2)).values)
