import logging

import pytest

from config import DEFAULT_SEED, SEED_ENV_VAR, default_seed, setup_logging
from errors import ValidationError


def test_default_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV_VAR, ' ')
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV_VAR, '42')
    assert default_seed() == 42
    monkeypatch.setenv(SEED_ENV_VAR, 'forty-two')
    with pytest.raises(ValidationError):
        default_seed()


@pytest.mark.parametrize('verbose, level', [(0, logging.WARNING), (1, logging.INFO),
                                            (2, logging.DEBUG), (5, logging.DEBUG)])
def test_setup_logging_levels(verbose, level):
    setup_logging(verbose)
    assert logging.getLogger().level == level
