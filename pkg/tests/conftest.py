import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from secat.lang import parse_document, realize_document

ROOT = pathlib.Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"


def load_model(filename, cap=None):
    doc = parse_document((MODELS / filename).read_text())
    return realize_document(doc, cap=cap)


@pytest.fixture(scope="session")
def realized():
    """One shared load of every model file, so object identities line up."""
    pres, mors = {}, {}
    for path in sorted(MODELS.glob("*.cdga")):
        p, m = load_model(path.name)
        pres.update(p)
        mors.update(m)
    return pres, mors


@pytest.fixture(scope="session")
def models(realized):
    return realized[0]


@pytest.fixture(scope="session")
def morphisms(realized):
    return realized[1]
