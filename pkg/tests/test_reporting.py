import json
from fractions import Fraction

import pytest

from transcheck.exactcore import Enclosure, LogMag, to_logmag
from transcheck.reporting import fraction_str, json_safe, to_canonical_json


class TestFractionStr:
    def test_integer_collapses(self):
        assert fraction_str(Fraction(4, 2)) == "2"

    def test_proper_fraction(self):
        assert fraction_str(Fraction(-3, 5)) == "-3/5"


class TestJsonSafe:
    def test_logmag_six_decimals(self):
        assert to_logmag(512).serialize() == {"sign": 1, "log2mag": "9.000000"}
        assert json_safe(LogMag(0)) == {"sign": 0}

    def test_enclosure(self):
        enc = Enclosure(Fraction(1, 3), Fraction(1, 2))
        assert json_safe(enc) == {"lower": "1/3", "upper": "1/2"}

    def test_big_integers_become_decimal_strings(self):
        big = 2**2187
        out = json_safe({"q": big, "small": 12})
        assert out["small"] == 12
        assert isinstance(out["q"], str)
        assert int(out["q"]) == big

    def test_unserializable_rejected(self):
        with pytest.raises(TypeError):
            json_safe(object())

    def test_canonical_json_sorted_and_newline_terminated(self):
        doc = to_canonical_json({"b": 1, "a": Fraction(1, 2)})
        assert doc.endswith("\n")
        assert doc.index('"a"') < doc.index('"b"')
        assert json.loads(doc) == {"a": "1/2", "b": 1}
