import pytest
from hypothesis import given
from hypothesis import strategies as st

from qubo_music.music.pitch import PitchDomain, PitchError, Scale, midi_to_name, parse_pitch, pitch_midi, render


class TestParsing:
    @pytest.mark.parametrize("name,expected", [("C4", ("C", 0, 4)), ("F#4", ("F", 1, 4)), ("Bb3", ("B", -1, 3))])
    def test_parse(self, name, expected):
        assert parse_pitch(name) == expected

    @pytest.mark.parametrize("bad", ["H4", "C", "4C", "C#x"])
    def test_reject(self, bad):
        with pytest.raises(PitchError):
            parse_pitch(bad)

    def test_midi_numbers(self):
        assert pitch_midi("C4") == 60
        assert pitch_midi("A4") == 69
        assert pitch_midi("B#3") == pitch_midi("C4")

    @given(st.integers(0, 127), st.booleans())
    def test_midi_round_trip(self, m, flats):
        assert pitch_midi(midi_to_name(m, flats)) == m


class TestScale:
    def test_degrees_c_major(self):
        assert render([1, 2, 3], Scale("C4")) == ["C4", "D4", "E4"]
        assert render([8], Scale("C4")) == ["C5"]

    def test_semitone_offset(self):
        assert render([7], Scale("C4"), "semitone") == ["G4"]
        assert render([0], Scale("C4", "chromatic"), "semitone") == ["C4"]

    def test_d_major_spelling(self):
        assert [Scale("D4").degree(d) for d in range(1, 9)] == ["D4", "E4", "F#4", "G4", "A4", "B4", "C#5", "D5"]

    def test_g_minor_spelling(self):
        assert [Scale("G4", "natural-minor").degree(d) for d in (3, 6, 7)] == ["Bb4", "Eb5", "F5"]
        assert Scale("G4", "natural-minor").abc_key() == "Gm"
        assert Scale("G4", "natural-minor").key_signature() == {"B": -1, "E": -1}

    def test_out_of_range_degree(self):
        with pytest.raises(PitchError):
            render([9], Scale())
        with pytest.raises(PitchError):
            render([0], Scale())

    @pytest.mark.parametrize("tonic", ["C4", "G3", "F4", "Bb3", "E4"])
    @pytest.mark.parametrize("mode", ["major", "natural-minor"])
    def test_degree_of_inverts_degree(self, tonic, mode):
        s = Scale(tonic, mode)
        for d in range(1, 9):
            assert s.degree_of(s.degree(d)) == d

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            Scale("C4", "dorian")


class TestDomain:
    def test_invariants(self):
        with pytest.raises(ValueError):
            PitchDomain("named", ())
        with pytest.raises(ValueError):
            PitchDomain("named", ("C4", "C4"))
        with pytest.raises(ValueError):
            PitchDomain("degree", (0, 1))

    def test_anchor(self):
        assert PitchDomain("degree", (3, 1, 5)).first == 1
        assert PitchDomain("semitone", (4, 0)).first == 0
        assert PitchDomain("named", ("E4", "C4")).first == "E4"
