"""Tests for TOML configuration files."""

import pytest

from szemeredi_codec.codec.config import FileConfig, load_config
from szemeredi_codec.codec.errors import InvalidArgumentError, ParseError
from szemeredi_codec.codec.experiment import ExperimentSpec
from szemeredi_codec.codec.pipeline import CodecConfig


@pytest.fixture
def write(tmp_path):
    def _write(text):
        path = tmp_path / "codec.toml"
        path.write_text(text)
        return path

    return _write


def test_full_file(write):
    path = write(
        """
[codec]
eps_grid = [0.2, 0.25, 0.3]
kernel = 5
reconstruct_irregular = true

[synth]
clusters = 6
weighted = true

[experiment]
sizes = [200, 400]
repetitions = 3
"""
    )
    config = load_config(path)
    assert config.codec == CodecConfig(
        eps_grid=(0.2, 0.25, 0.3), kernel=5, reconstruct_irregular=True
    )
    assert config.synth == {"clusters": 6, "weighted": True}
    assert config.experiment == {"sizes": (200, 400), "repetitions": 3}
    spec = ExperimentSpec(codec=config.codec, **config.experiment)
    assert spec.sizes == (200, 400) and spec.codec.kernel == 5


def test_empty_file(write):
    assert load_config(write("")) == FileConfig()


def test_unknown_key(write):
    with pytest.raises(InvalidArgumentError, match="kernal"):
        load_config(write("[codec]\nkernal = 3\n"))


def test_codec_not_nested_in_experiment(write):
    with pytest.raises(InvalidArgumentError, match="codec"):
        load_config(write("[experiment]\ncodec = 1\n"))


def test_unknown_table(write):
    with pytest.raises(InvalidArgumentError, match="plots"):
        load_config(write("[plots]\ndpi = 100\n"))


def test_invalid_value(write):
    with pytest.raises(InvalidArgumentError):
        load_config(write("[codec]\nkernel = 4\n"))


def test_syntax_error(write):
    path = write("[codec]\nkernel = = 3\n")
    with pytest.raises(ParseError) as info:
        load_config(path)
    assert info.value.path == path
    assert info.value.line == 2
