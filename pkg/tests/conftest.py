import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treequery.fixtures import citation_corpus


@pytest.fixture(scope="session")
def citation():
    return citation_corpus()
