import pytest

from g2pstack.config import SEED_ENV_VAR, Settings, load_settings, read_config_file
from g2pstack.errors import UsageError


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    # keep a developer's .env and seed variable out of the results
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


class TestLoadSettings:
    def test_defaults(self):
        assert load_settings() == Settings()

    def test_overrides_win_and_none_is_unset(self):
        settings = load_settings(overrides={"seed": 3, "k": None, "em-iters": "5"})
        assert settings.seed == 3
        assert settings.k == 1
        assert settings.em_iters == 5

    def test_environment_seed(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "21")
        assert load_settings().seed == 21
        assert load_settings(overrides={"seed": 4}).seed == 4

    def test_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("inner-folds=3\nmeta_learners=ib1ig, igtree\nwith-spelling=yes\ntolerance=1e-6\n")
        settings = load_settings(path)
        assert settings.inner_folds == 3
        assert settings.meta_learners == ("ib1ig", "igtree")
        assert settings.with_spelling is True
        assert settings.tolerance == 1e-6

    def test_flags_beat_the_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("folds=4\n")
        assert load_settings(path, {"folds": 6}).folds == 6


class TestValidation:
    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("fold_count=4\n")
        with pytest.raises(UsageError, match="fold_count"):
            read_config_file(path)

    def test_unknown_override(self):
        with pytest.raises(UsageError):
            load_settings(overrides={"colour": "red"})

    def test_bad_value(self):
        with pytest.raises(UsageError, match="with_spelling"):
            load_settings(overrides={"with_spelling": "maybe"})

    @pytest.mark.parametrize("overrides", [
        {"weighting": "chi2"},
        {"component": "svm"},
        {"meta_learners": "ib1ig,perceptron"},
        {"folds": 1},
        {"threshold": 0},
        {"k": 0},
    ])
    def test_out_of_contract_settings(self, overrides):
        with pytest.raises(UsageError):
            load_settings(overrides=overrides)

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_settings(tmp_path / "absent.cfg")

    def test_effective_jobs(self):
        assert Settings(jobs=3).effective_jobs() == 3
        assert Settings(jobs=0).effective_jobs() >= 1
