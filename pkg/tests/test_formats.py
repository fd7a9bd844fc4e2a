import pytest

from superint.formats import parse_symmetry_file, read_data


def test_keys_comments_and_continuations():
    text = "# header\nsystem: CAGED  # trailing\np: 2\nq: 2\nA: u1*u2\n   + H\nD: 0\n"
    assert parse_symmetry_file(text) == {"system": "CAGED", "p": "2", "q": "2", "A": "u1*u2 + H",
                                         "D": "0"}


@pytest.mark.parametrize("text", ["  orphan continuation\n", "no separator\n", "A: 1\nA: 2\n"])
def test_malformed(text):
    with pytest.raises(ValueError):
        parse_symmetry_file(text)


def test_packaged_data():
    assert "KEPLER-DEF" in read_data("kepler_k2.sym")
    assert read_data("caged_6_4_printed.txt").count("=") >= 4
