import pytest

from multizero.errors import (DimensionMismatch, DuplicateRateLabel, InputSyntaxError,
                              RankDeficient, UnknownSpecies)
from multizero.linalg import RatMatrix, rref
from multizero.model import (build_system, format_system, network_to_system, parse_network,
                             parse_system)

from conftest import DATA

HHK_C = [[1, 0, 0, 0, 1, -1],
         [0, 1, 0, 0, 0, -1],
         [0, 0, 1, 0, -1, 0],
         [0, 0, 0, 1, 1, -1]]
HHK_M = [[1, 0, 0, 0, 0, 0],
         [0, 1, 0, 0, 0, 0],
         [0, 0, 1, 1, 0, 0],
         [0, 0, 0, 0, 1, 0],
         [0, 0, 0, 1, 1, 0],
         [0, 0, 0, 0, 0, 1]]


def test_hhk_network_matrices(hhk):
    assert hhk.C == RatMatrix.from_rows(HHK_C)
    assert [list(r) for r in hhk.M] == HHK_M
    assert hhk.column_permutation == tuple(range(6))
    assert hhk.rate_labels == ("k1", "k2", "k3", "k4", "k5", "k6")
    # L is row-equivalent to the two conservation laws
    assert rref(hhk.L)[0] == RatMatrix.from_rows([[1, 1, 1, 1, 0, 0], [0, 0, 0, 0, 1, 1]])


def test_matrix_file_matches_network(hhk, hhk_matrix):
    assert hhk_matrix.C == hhk.C
    assert hhk_matrix.M == hhk.M
    assert hhk_matrix.L == hhk.L


def test_format_round_trip(hhk):
    again = parse_system(format_system(hhk))
    assert again.C == hhk.C and again.M == hhk.M and again.L == hhk.L


def test_format_restores_original_column_order():
    sys = build_system(RatMatrix.from_rows([[0, 1, 1], [0, 2, 1]]), [[1, 0, 2], [0, 1, 1]], None)
    assert sys.column_permutation == (1, 2, 0)
    text = format_system(sys)
    assert text.splitlines()[1] == "0 1 1"
    assert "L" not in text


@pytest.mark.parametrize("text, exc, line, col", [
    ("species A B\nrxn k1: A -> C\n", UnknownSpecies, 2, 14),
    ("species A\nrxn k1: A -> 0\nrxn k1: 0 -> A\n", DuplicateRateLabel, 3, 5),
    ("species A\nreaction k1: A -> 0\n", InputSyntaxError, 2, 1),
    ("species A\nrxn k1: A -> -> 0\n", InputSyntaxError, 2, 1),
    ("species A\nrxn k1: x A -> 0\n", InputSyntaxError, 2, 9),
])
def test_network_errors_have_locations(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_network(text)
    assert info.value.line == line
    assert info.value.column == col
    assert f"line {line}" in str(info.value)


def test_network_comments_and_coefficients():
    net = parse_network("# header\nspecies A B\nrxn k: 2 A + B -> 0  # decay\n")
    assert net.reactions[0].reactants == (2, 1)
    assert net.reactions[0].products == (0, 0)


def test_single_reaction_gives_one_row():
    sys = network_to_system(parse_network("species A B\nrxn k: A -> B\n"))
    assert sys.C.rows == 1
    assert sys.L.rows == 1


def test_full_rank_network_has_no_l_block():
    sys = network_to_system(parse_network("species A\nrxn k1: 0 -> A\nrxn k2: A -> 0\n"))
    assert sys.L.rows == 0
    assert "L" not in format_system(sys)


@pytest.mark.parametrize("text, exc", [
    ("C 1 2\n1 -1\n", InputSyntaxError),
    ("C 1 2\n1 -1\nM 1 2\n1 1/2\n", InputSyntaxError),
    ("C 1 2\n1 x\nM 1 2\n1 3\n", InputSyntaxError),
    ("C 1 2\n1 -1\nM 1 3\n1 3 0\n", DimensionMismatch),
    ("C 2 2\n1 1\n1 1\nM 2 2\n1 0\n0 1\n", RankDeficient),
    ("C 1 2\n1 -1\nM 2 2\n1 0\n0 1\n", DimensionMismatch),
])
def test_matrix_format_errors(text, exc):
    with pytest.raises(exc):
        parse_system(text)


def test_matrix_error_location():
    with pytest.raises(InputSyntaxError) as info:
        parse_system("C 1 2\n1 y\nM 1 2\n1 3\n")
    assert (info.value.line, info.value.column) == (2, 3)


def test_data_files_parse():
    for path in DATA.iterdir():
        if path.suffix == ".mat":
            parse_system(path.read_text())
        elif path.suffix == ".crn":
            network_to_system(parse_network(path.read_text()))
