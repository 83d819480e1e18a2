__version__ = "0.1.0"

# Bump a format version whenever the corresponding file layout changes.
DATASET_FORMAT_VERSION = 1
CENTROIDS_FORMAT_VERSION = 1
LEDGER_FORMAT_VERSION = 1
