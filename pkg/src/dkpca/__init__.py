"""Diffusion kernel PCA for supervised word sense disambiguation."""

__version__ = "0.1.0"

from .classify import KnnModel, knn_fit, knn_predict, knn_predict_many
from .corpus import (DocumentTermMatrix, IncidenceMatrix, Instance, LabeledCorpus, Vocabulary,
                     build_doc_term_matrix, build_vocabulary, corpus_from_pairs, load_dataset, load_stopwords,
                     tokenize)
from .errors import (ContractViolation, DatasetError, DegenerateKernelError, DKPCAError, EmptyInputError,
                     NumericError, ParameterError, ParseError, ResourceError)
from .evaluation import (EvaluationReport, MetricSet, PipelineConfig, SplitPlan, compute_metrics, embed,
                         make_splits, run_experiment)
from .kernels import (CooccurrenceMatrix, KernelMatrix, SemanticMatrix, cooccurrence_matrix,
                      diffusion_semantic_matrix, gram_diffusion, gram_linear, gram_poly, gram_rbf,
                      validate_mercer)
from .kpca import (CenteredKernel, EigenSpectrum, Projection, center_kernel, kernel_pca, project, select_dimension,
                   symmetric_eigendecomposition)
