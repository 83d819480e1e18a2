import json
from pathlib import Path

MINICORPUS_DIR = Path(__file__).resolve().parent / "minicorpus"
LABELS_PATH = Path(__file__).resolve().parent / "minicorpus_labels.json"


def load_labels() -> dict[str, set[str]]:
    with open(LABELS_PATH, encoding="utf-8") as handle:
        return {name: set(features) for name, features in json.load(handle).items()}
