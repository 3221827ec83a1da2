#!/usr/bin/env python3
"""High-precision reference values for the closed-form rating formulas.

Evaluates every formula directly with mpmath at 50 digits, independently of
the C++ implementation, and prints a C++ header. The checked-in
tests/golden_values.hpp is the output of:

    python3 scripts/golden_values.py > tests/golden_values.hpp
"""
import mpmath as mp

mp.mp.dps = 50

Q = mp.mpf("0.0057565")


def elo_pair(mu_i, mu_j, d):
    return 1 / (1 + mp.e ** ((mu_j - mu_i) / d))


def glicko_g(sigma):
    return 1 / mp.sqrt(1 + 3 * Q**2 * sigma**2 / mp.pi**2)


def glicko_pair(mu_i, s_i, mu_j, s_j, d):
    g = glicko_g(mp.sqrt(s_i**2 + s_j**2))
    return 1 / (1 + mp.mpf(10) ** (-g * (mu_i - mu_j) / d))


def v(x):
    return mp.npdf(x) / mp.ncdf(x)


def trueskill_pair(mu_w, s_w, mu_l, s_l, beta):
    t = mu_w - mu_l
    c = mp.sqrt(2 * beta**2 + s_w**2 + s_l**2)
    vv = v(t / c)
    w = vv * (vv + t / c)
    mw = mu_w + s_w**2 / c * vv
    ml = mu_l - s_l**2 / c * vv
    sw = mp.sqrt(s_w**2 * (1 - s_w**2 / c**2 * w))
    sl = mp.sqrt(s_l**2 * (1 - s_l**2 / c**2 * w))
    return mw, sw, ml, sl


def dcg(gains):
    return sum(g / mp.log(p + 2, 2) for p, g in enumerate(gains))


def main():
    vals = {}
    vals["kEloWin1700vs1500"] = elo_pair(mp.mpf(1700), mp.mpf(1500), 400)
    vals["kGlickoG350"] = glicko_g(mp.mpf(350))
    vals["kGlickoG100"] = glicko_g(mp.mpf(100))
    vals["kGlickoGSqrt10900"] = glicko_g(mp.sqrt(10900))
    vals["kGlickoWin1400vs1500"] = glicko_pair(1400, 30, 1500, 100, 400)
    vals["kGlickoDSquaredHalf"] = 1 / (Q**2 * mp.mpf("0.25"))

    # Two equal default teams, team 0 wins.
    s = mp.mpf(350)
    pr = glicko_pair(1500, s, 1500, s, 400)
    d2 = 1 / (Q**2 * glicko_g(s) ** 2 * pr * (1 - pr))
    denom = 1 / s**2 + 1 / d2
    vals["kGlickoWinnerMu"] = 1500 + Q / denom * glicko_g(s) * (1 - pr)
    vals["kGlickoWinnerSigma"] = mp.sqrt(1 / denom)

    vals["kTrueSkillV0"] = v(mp.mpf(0))
    vals["kTrueSkillVMinus5"] = v(mp.mpf(-5))
    vals["kTrueSkillVMinus10"] = v(mp.mpf(-10))
    vals["kTrueSkillVMinus30"] = v(mp.mpf(-30))
    vals["kTrueSkillV3"] = v(mp.mpf(3))

    mu, sig, beta = mp.mpf(25), mp.mpf(25) / 3, mp.mpf("4.16")
    mw, sw, ml, sl = trueskill_pair(mu, sig, mu, sig, beta)
    vals["kTrueSkillEqualWinnerMu"] = mw
    vals["kTrueSkillEqualWinnerSigma"] = sw
    vals["kTrueSkillEqualLoserMu"] = ml

    # Unequal pair: favourite (30, 4) beats underdog (20, 6).
    mw, sw, ml, sl = trueskill_pair(mp.mpf(30), mp.mpf(4), mp.mpf(20), mp.mpf(6), beta)
    vals["kTrueSkillFavWinnerMu"] = mw
    vals["kTrueSkillFavWinnerSigma"] = sw
    vals["kTrueSkillFavLoserMu"] = ml
    vals["kTrueSkillFavLoserSigma"] = sl

    vals["kNdcgReversedPair"] = dcg([0, 1]) / dcg([1, 0])
    vals["kNdcgThreeTeams"] = dcg([1, 2, 0]) / dcg([2, 1, 0])

    print("// Generated by scripts/golden_values.py (mpmath, 50 digits). Do not edit.")
    print("#pragma once")
    print()
    print("namespace golden {")
    for name, value in vals.items():
        print(f"inline constexpr double {name} = {mp.nstr(value, 17)};")
    print("}  // namespace golden")


if __name__ == "__main__":
    main()
