from noisyq.classifiers.base import (
    LabeledDataset,
    accuracy,
    load_model,
    save_model,
    signed,
    to_binary,
)
from noisyq.classifiers.pegasos import PegasosModel, pegasos_train
from noisyq.classifiers.qsvc import QsvcModel, qsvc_train
from noisyq.classifiers.variational import (
    VariationalModel,
    qnn_forward,
    qnn_train,
    vqc_decision,
    vqc_train,
)

__all__ = [
    "LabeledDataset",
    "PegasosModel",
    "QsvcModel",
    "VariationalModel",
    "accuracy",
    "load_model",
    "pegasos_train",
    "qnn_forward",
    "qnn_train",
    "qsvc_train",
    "save_model",
    "signed",
    "to_binary",
    "vqc_decision",
    "vqc_train",
]
