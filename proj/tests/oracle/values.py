"""High-precision reference values frozen into the C++ tests.

Run: python3 tests/oracle/values.py
"""
import mpmath as mp
import numpy as np
from scipy.stats import binom, norm

mp.mp.dps = 50
ln = mp.log


def mu_min(d, K, r):
    return mp.sqrt(2 * r * ln(d - K))


def Q(t):
    return mp.erfc(mp.mpf(t) / mp.sqrt(2)) / 2


def m0(d, r):
    g = 1 - mp.sqrt(r)
    ratio = mp.sqrt(2 * mp.pi) * mp.e * (2 * g**2 * ln(d) + 1) / (g * mp.sqrt(2 * ln(d))) * mp.mpf(d) ** (g**2)
    return mp.ceil(max(1, ratio) * 8 * ln(d))


def a_q(K, L, d):
    return mp.sqrt(2 * ln(mp.mpf(d - K) / (L - K + 1)))


def b_q(K, L, d, r):
    return a_q(K, L, d) - mp.sqrt(2 * r * ln(d - K))


def m_kl(d, r, K, L):
    b = b_q(K, L, d, r)
    root = mp.sqrt(1 - ln(L - K + 1) / ln(d - K)) - mp.sqrt(r)
    term = mp.mpf(8)
    if b > 0:
        term = max(term, 4 * mp.sqrt(2 * mp.pi) * (b**2 + 1) / b * mp.mpf(d - K) ** (root**2))
    return mp.ceil(term * 8 * ln(d))


def m_eff_large(d, K, r):
    g = 1 - mp.sqrt(r)
    lr = ln(d - K)
    return mp.ceil(8 * mp.sqrt(2 * mp.pi) * (g**2 * 2 * lr + 1) / (g * mp.sqrt(2 * lr)) * mp.mpf(d - K) ** (g**2) * ln(d))


def mid_tau(d, K, r, M):
    return mp.sqrt(2 * r * ln(d - K)) + mp.sqrt(2 * ln(M / (32 * mp.sqrt(mp.pi) * ln(d) ** 1.5)))


def mid_min_snr(d, K, M):
    non = mp.sqrt(2 * ln(5 * M / (mp.sqrt(2 * mp.pi) * 4 * ln(d))))
    shift = mp.sqrt(2 * ln(M / (32 * mp.sqrt(mp.pi) * ln(d) ** 1.5)))
    gap = non - shift + mp.mpf(1) / d
    return gap**2 / (2 * ln(d - K))


def binom_cdf(k, n, p):
    p = mp.mpf(p)
    return mp.fsum(mp.binomial(n, j) * p**j * (1 - p) ** (n - j) for j in range(0, k + 1))


def p_send_topl(d, K, L, r):
    return Q(b_q(K, L, d, r)) * binom_cdf(L - K, d - K, Q(a_q(K, L, d)))


def emp_th_scan(d, K, r, m):
    """Highest t on the 1e-3 grid satisfying the vote-separation predicate
    with the fixed (U=2, P=3) threshold encoding; independent of the C++."""
    mu = float(mu_min(d, K, r))
    slack = np.log(d - K) / np.log(np.log(d - K))
    top = int(np.floor((mu + np.sqrt(2 * np.log(d - K))) / 1e-3))
    for k in range(top, -1, -1):
        t = k * 1e-3
        t_hat = min(np.floor(t * 8) / 8, 7.875)
        p_s = norm.sf(t - mu)
        p_n = norm.sf(t_hat)
        cut = int(np.ceil(m * p_n * slack)) - 1
        if binom.cdf(cut, m, p_s) < 1.0 / d:
            return t
    return None


def show(name, value, digits=17):
    print(f"{name} = {mp.nstr(value, digits)}")


show("mu_min(16,1,0.5)", mu_min(16, 1, 0.5))
show("mu_min(2^15,1,1)", mu_min(2**15, 1, 1))
show("Q(1)", Q(1))
show("Q(sqrt(2 ln 1000))", Q(mp.sqrt(2 * ln(1000))))
show("Q(5)", Q(5))
t = mp.mpf(1)
dens = mp.exp(-t**2 / 2) / mp.sqrt(2 * mp.pi)
show("lemma1 lower(1)", t / (t**2 + 1) * dens)
show("lemma1 upper(1)", dens / t)
for r in (0.5, 0.6, 0.7):
    show(f"m0(4096,{r})", m0(4096, r))
show("m0(2^15, 0.5)", m0(2**15, 0.5))
show("a(1,1,17)", a_q(1, 1, 17))
show("a(1,10,2^15)", a_q(1, 10, 2**15))
show("b(1,10,2^15,0.3)", b_q(1, 10, 2**15, 0.3))
show("m_kl(2^15,0.5,1,10)", m_kl(2**15, 0.5, 1, 10))
show("m_kl(4096,0.6,1,1)", m_kl(4096, 0.6, 1, 1))
show("m_kl(1024,0.5,2,5)", m_kl(1024, 0.5, 2, 5))
show("ceil(16 ln 1024)", mp.ceil(16 * ln(1024)))
show("tau_small(1024,2,0.5)", mu_min(1024, 2, 0.5))
show("m_eff_large(1024,1,0.5)", m_eff_large(1024, 1, 0.5))
for r in (0.36, 0.49, 0.64):
    show(f"m_eff_large(1001,1,{r})", m_eff_large(1001, 1, r))
show("mid_lower_M(2^15)", 32 * mp.sqrt(mp.e * mp.pi) * ln(2**15) ** 1.5)
show("mid_tau(2^15,1,0.5,8192)", mid_tau(2**15, 1, 0.5, 8192))
show("mid_min_snr(2^15,1,8192)", mid_min_snr(2**15, 1, 8192))
show("pi_risk_bound(1024,4,32,0.5)",
     mp.mpf(4) / 32 * (1 + mp.mpf(1) / 1024 + mp.mpf(1) / 1024**2) + 2 * 4 * mu_min(1024, 4, 0.5) ** 2 / 1024)
show("binom_cdf(5,100,0.03)", binom_cdf(5, 100, 0.03))
show("binom_cdf(10,64,0.2)", binom_cdf(10, 64, 0.2))
show("binom_sf(44,100,0.3)", 1 - binom_cdf(44, 100, 0.3))
show("binom_sf(60,1000,0.01)", 1 - binom_cdf(60, 1000, 0.01), 12)
show("binom_cdf(3,32767,1e-4)", binom_cdf(3, 32767, 1e-4))
show("p_send_topl(2^15,1,10,0.3)", p_send_topl(2**15, 1, 10, 0.3))
show("p_send_topl(2^15,5,10,0.5)", p_send_topl(2**15, 5, 10, 0.5))
show("vote_slack(2^15,1)", ln(2**15 - 1) / ln(ln(2**15 - 1)))
show("necessary(2^15,64)", max(mp.mpf(1) / 64, ln(2**15) ** -3))
show("ln^-3(2^15)", ln(2**15) ** -3)
print("emp_th_scan(2^15,1,0.3,64) =", emp_th_scan(2**15, 1, 0.3, 64))
print("emp_th_scan(2^15,1,0.8,64) =", emp_th_scan(2**15, 1, 0.8, 64))
print("emp_th_scan(2^12,1,0.5,64) =", emp_th_scan(2**12, 1, 0.5, 64))
