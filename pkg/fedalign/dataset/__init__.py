from .dataset import LabeledDataset
from .dataset import DatasetError
from .dataset import concatenate
from .dataset import read_dataset
from .dataset import write_dataset


__all__ = [
    "LabeledDataset",
    "DatasetError",
    "concatenate",
    "read_dataset",
    "write_dataset",
]
