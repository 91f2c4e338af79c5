"""Very Simple Classifier: random opposite-class pair hyperplanes, weighted by a
locality confidence, feeding a ridge-regularized linear readout."""
__version__ = "0.1.0"

from vsc.data import Dataset, gen_ringnorm, gen_twonorm, gen_xor_blobs, load_dataset
from vsc.evaluation import ClassifierSpec, compare, rankings, run_cv, sweep
from vsc.kernels import BACKEND
from vsc.model import ELM, KNN, VSC, PairMode, VscConfig, fit_vsc, predict_vsc
from vsc.stats import paired_t_test

__all__ = [
    "BACKEND",
    "ClassifierSpec",
    "Dataset",
    "ELM",
    "KNN",
    "PairMode",
    "VSC",
    "VscConfig",
    "compare",
    "fit_vsc",
    "gen_ringnorm",
    "gen_twonorm",
    "gen_xor_blobs",
    "load_dataset",
    "paired_t_test",
    "predict_vsc",
    "rankings",
    "run_cv",
    "sweep",
]
