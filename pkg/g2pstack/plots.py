"""PNG charts for experiment results (fold accuracies, rule-prefix curves)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402


def plot_folds(result, path, title="Accuracy per fold"):
    frame = result.to_frame()
    folds = frame[~frame["fold"].isin(["mean", "stddev"])]
    long = pd.melt(folds, id_vars=["fold"], value_vars=["phoneme_acc", "word_acc"],
                   var_name="level", value_name="accuracy")

    fig, ax = plt.subplots(figsize=(12, 6))
    sns.barplot(x="fold", y="accuracy", hue="level", data=long, palette="coolwarm", ax=ax)
    ax.axhline(result.mean_word, color="grey", linestyle="--", linewidth=1)
    ax.set_ylim(max(0.0, long["accuracy"].min() - 0.05), 1.0)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def plot_prefix_curve(curve, path, title="Overlap after the first k rules"):
    long = pd.melt(curve, id_vars=["rules"], value_vars=["word_overlap", "phoneme_overlap"],
                   var_name="level", value_name="overlap")

    fig, ax = plt.subplots(figsize=(12, 6))
    sns.lineplot(x="rules", y="overlap", hue="level", data=long, palette="viridis", linewidth=2.5, ax=ax)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
