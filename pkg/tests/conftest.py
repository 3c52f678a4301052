from pathlib import Path

import pytest

from foldkit.dataset import apply_background, load_csv, parse_background

DATA = Path(__file__).parent / "data"
UCI_DIR = Path(__file__).parent.parent / "data" / "uci"


def load_penguin():
    """The four-example flying-birds dataset with its background rule
    (penguins are birds) already applied."""
    schema, examples = load_csv(str(DATA / "penguin.csv"), "fly")
    rules = parse_background((DATA / "penguin_bg.lp").read_text())
    examples = apply_background(schema, examples, rules)
    pos = [e for e in examples if e.positive]
    neg = [e for e in examples if not e.positive]
    return schema, pos, neg


@pytest.fixture
def penguin():
    return load_penguin()
