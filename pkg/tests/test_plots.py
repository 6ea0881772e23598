import pandas as pd

from g2pstack.evaluation import FoldScore, aggregate
from g2pstack.plots import plot_folds, plot_prefix_curve

PNG_MAGIC = b"\x89PNG"


def test_fold_chart(tmp_path):
    result = aggregate([FoldScore(0, 0.9, 0.7, 40, 10), FoldScore(1, 0.95, 0.8, 40, 10)])
    path = plot_folds(result, tmp_path / "folds.png")
    assert path.read_bytes()[:4] == PNG_MAGIC


def test_prefix_curve_chart(tmp_path):
    curve = pd.DataFrame({
        "rules": [0, 1, 2],
        "errors": [30, 12, 5],
        "word_overlap": [0.6, 0.8, 0.9],
        "phoneme_overlap": [0.9, 0.95, 0.98],
    })
    path = plot_prefix_curve(curve, tmp_path / "curve.png")
    assert path.read_bytes()[:4] == PNG_MAGIC
