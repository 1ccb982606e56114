import numpy as np
import pytest

from scde import (
    ChannelModel,
    TransferTable,
    as_channel,
    bec_transfer,
    dec_transfer,
    load_transfer_table,
    make_channel,
    shannon_threshold,
    sir,
)
from oracles import shannon_threshold_oracle, sir_oracle


class TestDecTransfer:
    def test_known_values(self):
        assert dec_transfer(0.5, 0.0) == pytest.approx(0.25, abs=1e-15)
        assert dec_transfer(0.5, 1.0) == pytest.approx(4 / 9, abs=1e-15)
        # eps=1 erases everything regardless of priors
        assert dec_transfer(1.0, 0.3) == pytest.approx(1.0, abs=1e-15)

    def test_squeeze_between_eps_sq_and_eps(self):
        eps = np.linspace(0.01, 0.99, 37)
        x = np.linspace(0.0, 1.0, 41)
        E, X = np.meshgrid(eps, x)
        f = dec_transfer(E, X)
        assert np.all(f >= E**2 - 1e-15)
        assert np.all(f <= E + 1e-15)

    def test_endpoints(self):
        eps = np.linspace(0.0, 1.0, 101)
        assert np.allclose(dec_transfer(eps, 0.0), eps**2, atol=1e-15)
        assert np.allclose(dec_transfer(eps, 1.0), 4 * eps**2 / (1 + eps) ** 2,
                           atol=1e-15)

    def test_monotone_in_both_arguments(self):
        grid = np.linspace(0.0, 1.0, 100)
        f = dec_transfer(grid[:, None], grid[None, :])
        assert np.all(np.diff(f, axis=0) >= -1e-15)   # increasing in eps
        assert np.all(np.diff(f, axis=1) >= -1e-15)   # increasing in x

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            dec_transfer(1.2, 0.5)
        with pytest.raises(ValueError):
            dec_transfer(0.5, -0.1)
        with pytest.raises(ValueError):
            dec_transfer(np.array([0.1, 1.5]), 0.5)


class TestBecTransfer:
    def test_prior_independent(self):
        x = np.linspace(0, 1, 11)
        assert np.all(bec_transfer(0.37, x) == 0.37)

    def test_scalar_and_array(self):
        assert bec_transfer(0.2, 0.9) == 0.2
        out = bec_transfer(0.2, np.zeros(5))
        assert out.shape == (5,)


class TestShannonAlgebra:
    def test_sir_known_value(self):
        assert sir(0.5) == pytest.approx(2 / 3, abs=1e-12)

    def test_threshold_known_values(self):
        assert shannon_threshold(2 / 3) == pytest.approx(0.5, abs=1e-12)
        assert shannon_threshold(0.5) == pytest.approx(0.6403882032022076,
                                                       abs=1e-9)

    def test_threshold_matches_root_finding_oracle(self):
        for r in np.linspace(0.06, 0.94, 20):
            assert shannon_threshold(r) == pytest.approx(
                shannon_threshold_oracle(r), abs=1e-10)

    def test_round_trip(self):
        for r in np.linspace(0.05, 0.95, 100):
            assert abs(sir(shannon_threshold(r)) - r) < 1e-12

    def test_sir_matches_oracle(self):
        eps = np.linspace(0.0, 1.0, 50)
        assert np.allclose(sir(eps), [sir_oracle(e) for e in eps], atol=1e-14)

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            shannon_threshold(0.0)
        with pytest.raises(ValueError):
            shannon_threshold(1.0)
        with pytest.raises(ValueError):
            shannon_threshold(-0.2)


class TestChannelModel:
    def test_make_channel_dec(self):
        ch = make_channel("dec", 0.5)
        assert ch.kind == "dec"
        assert ch.transfer(1.0) == pytest.approx(4 / 9, abs=1e-15)

    def test_make_channel_bec(self):
        ch = make_channel("bec", 0.37)
        assert ch.transfer(0.9) == 0.37

    def test_with_epsilon(self):
        ch = make_channel("dec", 0.5).with_epsilon(0.3)
        assert ch.epsilon == 0.3
        assert ch.transfer(0.0) == pytest.approx(0.09, abs=1e-15)

    def test_epsilon_validation(self):
        with pytest.raises(ValueError):
            make_channel("dec", 1.5)
        with pytest.raises(ValueError):
            make_channel("dec", -0.1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_channel("awgn", 0.5)

    def test_as_channel_coercion(self):
        ch = as_channel("dec", epsilon=0.4)
        assert isinstance(ch, ChannelModel)
        assert ch.epsilon == 0.4
        same = as_channel(ch)
        assert same is ch
        with pytest.raises(TypeError):
            as_channel(3.14)


class TestTransferTable:
    def test_interpolation(self):
        tab = TransferTable(x=np.array([0.0, 0.5, 1.0]),
                            f=np.array([0.1, 0.2, 0.4]))
        assert tab(0.25) == pytest.approx(0.15, abs=1e-15)
        assert tab(1.0) == pytest.approx(0.4, abs=1e-15)

    def test_grid_must_span_unit_interval(self):
        with pytest.raises(ValueError):
            TransferTable(x=np.array([0.1, 0.5, 1.0]),
                          f=np.array([0.1, 0.2, 0.4]))

    def test_values_must_be_monotone(self):
        with pytest.raises(ValueError):
            TransferTable(x=np.array([0.0, 0.5, 1.0]),
                          f=np.array([0.3, 0.2, 0.4]))

    def test_values_must_be_probabilities(self):
        with pytest.raises(ValueError):
            TransferTable(x=np.array([0.0, 0.5, 1.0]),
                          f=np.array([0.1, 0.2, 1.4]))

    def test_custom_channel_uses_table(self):
        tab = TransferTable(x=np.array([0.0, 1.0]),
                            f=np.array([0.2, 0.3]))
        ch = make_channel("custom", 0.9, table=tab)
        assert ch.transfer(0.5) == pytest.approx(0.25, abs=1e-15)

    def test_custom_requires_table(self):
        with pytest.raises(ValueError):
            make_channel("custom", 0.5)

    def test_load_from_csv(self, tmp_path):
        p = tmp_path / "table.csv"
        p.write_text("x,f\n0.0,0.04\n0.5,0.10\n1.0,0.16\n")
        tab = load_transfer_table(p)
        assert tab(0.75) == pytest.approx(0.13, abs=1e-15)

    def test_load_without_header(self, tmp_path):
        p = tmp_path / "table.csv"
        p.write_text("0.0,0.04\n1.0,0.16\n")
        tab = load_transfer_table(p)
        assert tab(0.5) == pytest.approx(0.10, abs=1e-15)
