import pytest

from biquant.errors import ConfigError
from biquant.settings import Settings


def test_defaults():
    settings = Settings.from_env({})
    assert settings == Settings(samples=8, seed=0, box=20, workers=1, log_level="WARNING")


def test_environment_overrides():
    settings = Settings.from_env({"BIQUANT_SEED": "7", "BIQUANT_WORKERS": "4", "BIQUANT_LOG_LEVEL": "debug"})
    assert settings.seed == 7
    assert settings.workers == 4
    assert settings.log_level == "debug"


def test_bad_integer_in_environment():
    with pytest.raises(ConfigError):
        Settings.from_env({"BIQUANT_SAMPLES": "many"})


def test_updated_ignores_none():
    settings = Settings().updated(seed=None, samples=3)
    assert settings.seed == 0
    assert settings.samples == 3


@pytest.mark.parametrize("changes", [{"samples": 0}, {"workers": 0}, {"box": 0}, {"log_level": "LOUD"}])
def test_invalid_values(changes):
    with pytest.raises(ConfigError):
        Settings().updated(**changes)
