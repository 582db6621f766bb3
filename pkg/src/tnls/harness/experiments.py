"""Experiment runners behind the CLI subcommands.

Each runner consumes an ExperimentConfig and produces an
ExperimentReport; no runner touches the filesystem.  All randomness is
drawn from numpy's Philox generator keyed by the mandatory ``seed``
config value, so a (config, seed) pair pins every number in the
report.
"""

import math

import numpy as np
from scipy import stats

from ..cutoffs import eta1
from ..evolution import IVP, energy, mass, solve
from ..fields import Lattice, SpectralField, TorusField
from ..fitting import fit_loglog
from ..highlow import envelope_fit, hflf_schur_sums
from ..profiles import (
    Frame,
    bump_profile,
    gaussian_profile,
    make_profile,
    orthogonality_decay,
    pythagorean_report,
    rescale_to_torus,
)
from ..spacetime import free_z_norm, strichartz_ratio, trilinear_ratio
from ..spectral import (
    forward_transform,
    inverse_transform,
    lp_multiplier,
    lp_project,
    sobolev_norm,
)
from ..weyl import window_linf_lp
from .config import ConfigError, ExperimentConfig
from .reports import ExperimentReport

__all__ = [
    "run_extinction",
    "run_euclidean_comparison",
    "run_conservation",
    "run_strichartz",
    "run_trilinear",
    "run_orthogonality",
    "run_hflf",
]


def _rng(cfg: ExperimentConfig) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(cfg.require_seed()))


def _profile_from_config(cfg: ExperimentConfig, prefix: str = "profile."):
    kind = cfg.get_str(prefix + "kind", "bump")
    amplitude = cfg.get_float(prefix + "amplitude", 1.0)
    if kind == "bump":
        return bump_profile(cfg.get_float(prefix + "radius", 1.0), amplitude)
    if kind == "gaussian":
        return gaussian_profile(cfg.get_float(prefix + "sigma", 0.4), amplitude)
    raise ConfigError(f"unknown profile kind {kind!r} (want bump or gaussian)")


def _monotone_decreasing(vals, strict: bool = True) -> bool:
    pairs = zip(vals, vals[1:])
    if strict:
        return all(b < a for a, b in pairs)
    return all(b <= a for a, b in pairs)


# ----------------------------------------------------------------- extinction


def run_extinction(cfg: ExperimentConfig) -> ExperimentReport:
    """Two-branch norm and window sup of free concentrating data over an
    (N, T) sweep."""
    rep = ExperimentReport("extinction", cfg.echo())
    M = cfg.get_int("m")
    Ns = cfg.get_int_list("n_list")
    Ts = cfg.get_float_list("t_list")
    if not Ns or not Ts:
        rep.note("empty sweep")
        return rep
    if M < 4 * max(Ns):
        raise ConfigError(
            f"lattice M = {M} cannot resolve N = {max(Ns)} (need M >= 4N)"
        )
    if max(Ts) > min(Ns):
        raise ConfigError(
            f"window parameter T = {max(Ts)} exceeds the smallest scale "
            f"N = {min(Ns)}; the window (T/N^2, 1/T) would be empty"
        )
    phi = _profile_from_config(cfg)
    lattice = Lattice(M)
    rows = []
    for N in Ns:
        data = forward_transform(rescale_to_torus(phi, N, lattice))
        zs, sups = [], []
        for T in Ts:
            z = free_z_norm(data, (T / N**2, 1.0 / T)).value
            sup = window_linf_lp(data, N, T)
            zs.append(z)
            sups.append(sup)
            rows.append((N, float(T), z, sup))
        rep.add_check(
            f"z_decreasing_N{N}",
            _monotone_decreasing(zs) or all(z == 0.0 for z in zs),
            "Z over T: " + ", ".join(format(z, ".6g") for z in zs),
        )
        if all(s > 0.0 for s in sups) and len(sups) >= 2:
            rep.add_fit(f"linf_slope_N{N}", fit_loglog(Ts, sups))
        else:
            rep.note(f"N={N}: window sups not all positive, slope fit skipped")
    rep.add_table("extinction", ["N", "T", "z_value", "linf_sup"], rows)
    rep.add_plot("z_vs_T", "extinction", "T", "z_value", logx=True, logy=True)
    rep.add_plot("linf_vs_T", "extinction", "T", "linf_sup", logx=True, logy=True)
    if len(Ns) > 1:
        by_T = {}
        for N, T, z, _ in rows:
            by_T.setdefault(T, []).append(z)
        worst = max((max(v) / max(min(v), 1e-300)) for v in by_T.values())
        rep.add_check(
            "z_bounded_in_N",
            worst < 10.0 or all(max(v) == 0.0 for v in by_T.values()),
            f"max/min spread of Z across N at fixed T: {worst:.3g}",
        )
    return rep


# ---------------------------------------------------- euclidean comparison


def _two_sided_solve(data: TorusField, rho, horizon, n_steps, stride, dealias, on_sample):
    """Solve over [-horizon, horizon] from data at t = 0.

    The backward branch uses the conjugation symmetry u(-t) =
    conj(v(t)) where v solves the same equation from conj(data), so
    both branches are forward runs.  ``on_sample(sign, index, t,
    values)`` receives every stored sample; index 0 is t = 0.
    """
    lattice = data.lattice
    dt = horizon / n_steps
    for sign in (+1, -1):
        seed_vals = data.values if sign > 0 else np.conj(data.values)
        start = TorusField(lattice, seed_vals.copy(), 0.0)

        def observer(k, t, vals, _sign=sign):
            v = vals if _sign > 0 else np.conj(vals)
            on_sample(_sign, k, _sign * t, v)

        ivp = IVP(start, rho, (0.0, horizon), dt, dealias, sample_stride=stride)
        solve(ivp, observer=observer, store=False)


def run_euclidean_comparison(cfg: ExperimentConfig) -> ExperimentReport:
    """Torus solutions with concentrating data against the cutoff
    transplant of one large-box proxy solution, in H^1 over the
    concentration window."""
    rep = ExperimentReport("euclidean_comparison", cfg.echo())
    rho = cfg.get_float("rho", 1.0)
    T0 = cfg.get_float("t0", 1.0)
    Ns = cfg.get_int_list("n_list")
    if not Ns:
        rep.note("empty sweep")
        return rep
    Rs = cfg.get_float_list("r_list", [cfg.get_float("r_cut", 8.0)])
    L_box = cfg.get_int("l_box", 32)
    G = cfg.get_int("g", 256)
    n_steps = cfg.get_int("steps_per_side", 96)
    n_samples = cfg.get_int("samples_per_side", 8)
    dealias = cfg.get_str("dealias", "filter_none")
    R_max = max(Rs)
    if L_box < max(4.0 * R_max, 8.0):
        raise ConfigError(
            f"proxy box too small relative to R: L_box = {L_box} < "
            f"max(4R, 8) = {max(4.0 * R_max, 8.0):g}"
        )
    if G % L_box != 0 or G // L_box < 4:
        raise ConfigError(
            f"proxy lattice G = {G} must be a multiple r >= 4 of L_box = {L_box} "
            "so the transplant lands on torus lattice points"
        )
    r = G // L_box
    if n_steps % n_samples != 0:
        raise ConfigError("steps_per_side must be a multiple of samples_per_side")
    stride = n_steps // n_samples
    if dealias == "filter_none":
        rep.note("solver runs are non-dealiased (filter_none)")

    phi = _profile_from_config(cfg)
    # big-box proxy: the side-(2 pi L) problem maps onto the unit torus by
    # the critical rescaling w(x, s) = L^(1/2) v(Lx, L^2 s), same rho
    proxy_lat = Lattice(G)
    w0 = rescale_to_torus(phi, float(L_box), proxy_lat)
    spacing = 2.0 * math.pi / r  # proxy grid spacing in Euclidean y units
    half_idx = int(math.ceil(2.0 * R_max / spacing)) + 1
    if 2 * half_idx + 1 > G:
        raise ConfigError("cutoff radius does not fit inside the proxy box")
    sl = np.r_[0 : half_idx + 1, G - half_idx : G]  # centered subcube indices
    subcubes: dict = {}
    boundary_fraction = [0.0]
    interior = (3 * G) // 8  # |y|_inf below three quarters of pi*L

    def proxy_sample(sign, k, t, vals):
        cube = vals[np.ix_(sl, sl, sl)].copy()
        subcubes[(sign, k)] = cube
        if k == n_samples:
            total = float(np.sum(vals.real**2 + vals.imag**2))
            core = vals[np.ix_(*(3 * [np.r_[0:interior, G - interior : G]]))]
            inner = float(np.sum(core.real**2 + core.imag**2))
            boundary_fraction[0] = max(
                boundary_fraction[0], (total - inner) / max(total, 1e-300)
            )

    _two_sided_solve(
        w0, rho, T0 / L_box**2, n_steps, stride, dealias, proxy_sample
    )

    # index offsets of the subcube points, shared by proxy and torus grids
    offs = np.r_[0 : half_idx + 1, -half_idx:0]
    y_axis = spacing * offs  # Euclidean coordinates of subcube points
    yy = np.sqrt(
        y_axis[:, None, None] ** 2 + y_axis[None, :, None] ** 2 + y_axis[None, None, :] ** 2
    )

    rows = []
    dist_by_R = {R: [] for R in Rs}
    for N in Ns:
        M = r * N
        lattice = Lattice(M)
        f_N = rescale_to_torus(phi, float(N), lattice)
        h1_data = sobolev_norm(forward_transform(f_N), 1.0)
        worst = {R: 0.0 for R in Rs}

        tsl = offs % M  # torus lattice indices of the subcube
        ix = np.ix_(tsl, tsl, tsl)

        def torus_sample(sign, k, t, vals, _worst=worst, _ix=ix, _lat=lattice, _N=N):
            # proxy and torus samples share the index: s'_k = N^2 t_k / L^2
            cube = subcubes[(sign, k)]
            for R in Rs:
                cutoff = eta1(yy / R)
                V = np.zeros_like(vals)
                # transplant N^(1/2) eta(y/R) v(y, s) with v from the proxy:
                # v(y, s) = L^(-1/2) w(y / L, s / L^2)
                V[_ix] = (_N / L_box) ** 0.5 * cutoff * cube
                diff = TorusField(_lat, vals - V, t)
                d = sobolev_norm(forward_transform(diff), 1.0)
                _worst[R] = max(_worst[R], d)

        _two_sided_solve(
            f_N, rho, T0 / N**2, n_steps, stride, dealias, torus_sample
        )
        for R in Rs:
            rows.append(
                (N, float(R), worst[R], worst[R] / h1_data, boundary_fraction[0])
            )
            dist_by_R[R].append(worst[R])

    rep.add_table(
        "comparison",
        ["N", "R", "max_h1_distance", "relative_distance", "proxy_boundary_mass"],
        rows,
    )
    rep.add_plot("distance_vs_N", "comparison", "N", "max_h1_distance", logx=True, logy=True)
    for R, dists in dist_by_R.items():
        if len(dists) > 1:
            rep.add_check(
                f"distance_decreasing_R{R:g}",
                _monotone_decreasing(dists),
                "distances over N: " + ", ".join(format(d, ".6g") for d in dists),
            )
    rep.add_check(
        "proxy_boundary_mass_small",
        boundary_fraction[0] < 0.02,
        f"mass fraction in the outer box region: {boundary_fraction[0]:.3g}",
    )
    if rho == 0.0:
        worst_rel = max(row[3] for row in rows)
        rep.add_check(
            "linear_baseline",
            worst_rel <= 0.02,
            f"max relative transplant error at rho = 0: {worst_rel:.3g}",
        )
    return rep


# --------------------------------------------------------------- conservation


def _random_band_data(
    lattice: Lattice, band: int, rng: np.random.Generator, sigma: float = 2.0
) -> TorusField:
    """Random smooth data: gaussian coefficients under a spectral
    envelope, supported in |xi|_inf <= band, unit H^1 norm."""
    shape = (lattice.M,) * 3
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    fg = lattice.freq
    inside = (
        (np.abs(fg)[:, None, None] <= band)
        & (np.abs(fg)[None, :, None] <= band)
        & (np.abs(fg)[None, None, :] <= band)
    )
    coeffs *= inside * np.exp(-lattice.xi_sq / (2.0 * sigma**2))
    F = SpectralField(lattice, coeffs, 0.0)
    h1 = sobolev_norm(F, 1.0)
    F = SpectralField(lattice, coeffs / h1, 0.0)
    return inverse_transform(F)


def run_conservation(cfg: ExperimentConfig) -> ExperimentReport:
    """Mass and energy drift under time-step refinement."""
    rep = ExperimentReport("conservation", cfg.echo())
    M = cfg.get_int("m", 64)
    rho = cfg.get_float("rho", 1.0)
    dts = cfg.get_float_list("dt_list", [1e-3, 5e-4, 2.5e-4])
    t_end = cfg.get_float("t_end", 0.1)
    band = cfg.get_int("band", 4)
    dealias = cfg.get_str("dealias", "zero_pad_3x")
    if not dts:
        rep.note("empty sweep")
        return rep
    data = _random_band_data(Lattice(M), band, _rng(cfg))
    m0 = mass(data)
    e0 = energy(data, rho)
    rows = []
    for dt in sorted(dts, reverse=True):
        n = max(1, round(t_end / dt))
        traj = solve(IVP(data, rho, (0.0, t_end), dt, dealias, sample_stride=n))
        final = traj.fields[-1]
        dm = abs(mass(final) - m0) / m0
        de = abs(energy(final, rho) - e0) / max(abs(e0), 1e-300)
        rows.append((float(dt), dm, de))
    rep.add_table("drift", ["dt", "mass_drift", "energy_drift"], rows)
    rep.add_plot("energy_drift", "drift", "dt", "energy_drift", logx=True, logy=True)
    rep.add_check(
        "mass_exact",
        max(r[1] for r in rows) < 1e-12,
        f"worst relative mass drift: {max(r[1] for r in rows):.3g}",
    )
    if rho == 0.0 or max(r[2] for r in rows) < 1e-12:
        name = "linear_machine_drift" if rho == 0.0 else "drift_at_machine_level"
        rep.add_check(
            name,
            max(r[2] for r in rows) < 1e-12,
            f"worst energy drift: {max(r[2] for r in rows):.3g}",
        )
        return rep
    ratio_rows = []
    for (dt1, _, de1), (dt2, _, de2) in zip(rows, rows[1:]):
        ratio = de1 / max(de2, 1e-300)
        ratio_rows.append((dt1, dt2, ratio))
    if ratio_rows:
        rep.add_table("drift_ratios", ["dt_coarse", "dt_fine", "energy_ratio"], ratio_rows)
        ratios = [r[2] for r in ratio_rows]
        rep.add_check(
            "energy_second_order",
            all(3.0 <= q <= 5.0 for q in ratios),
            "halving ratios: " + ", ".join(format(q, ".3g") for q in ratios),
        )
    if len(rows) >= 2 and all(r[2] > 0 for r in rows):
        rep.add_fit("energy_drift_order", fit_loglog([r[0] for r in rows], [r[2] for r in rows]))
    return rep


# ----------------------------------------------------------------- strichartz


def _random_shell_field(
    lattice: Lattice, N: int, rng: np.random.Generator
) -> SpectralField:
    shape = (lattice.M,) * 3
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return lp_project(SpectralField(lattice, coeffs, 0.0), N, kind="shell")


def run_strichartz(cfg: ExperimentConfig) -> ExperimentReport:
    """Measured dispersive-inequality constants over random shell data."""
    rep = ExperimentReport("strichartz", cfg.echo())
    Ns = cfg.get_int_list("n_list")
    if not Ns:
        rep.note("empty sweep")
        return rep
    M = cfg.get_int("m", 64)
    p = cfg.get_float("p", 6.0)
    samples = cfg.get_int("samples", 20)
    dt = cfg.get_float("dt", 0.02)
    rng = _rng(cfg)
    lattice = Lattice(M)
    rows = []
    summary = []
    for N in Ns:
        vals = []
        for s in range(samples):
            f = _random_shell_field(lattice, N, rng)
            ratio = strichartz_ratio(f, N, p, dt=dt)
            vals.append(ratio)
            rows.append((N, s, ratio))
        summary.append((N, max(vals), float(np.mean(vals))))
    rep.add_table("ratios", ["N", "sample", "ratio"], rows)
    rep.add_table("per_shell", ["N", "sup_ratio", "mean_ratio"], summary)
    rep.add_plot("sup_vs_N", "per_shell", "N", "sup_ratio", logx=True)
    sups = [s[1] for s in summary]
    med = float(np.median(sups))
    spread_ok = max(sups) <= 1.5 * med and min(sups) >= med / 1.5
    rep.add_check(
        "sup_within_factor_1p5_of_median",
        spread_ok,
        f"per-shell sups {['%.4g' % s for s in sups]}, median {med:.4g}",
    )
    if not spread_ok:
        rep.note(
            "iid random data follows the gaussian-field law "
            "12^(1/6) (2 pi)^(-1) N^(5/p - 3/2) ||f||_2, so its normalized "
            "ratio decays and cannot sit within a tight factor of its median"
        )
    # sharpness witness: the coherent shell state saturates the scaling
    coh_rows = []
    for N in Ns:
        mult = lp_multiplier(lattice, N, kind="shell")
        f = SpectralField(lattice, mult.astype(complex), 0.0)
        coh_rows.append((N, strichartz_ratio(f, N, p, dt=dt)))
    rep.add_table("coherent_witness", ["N", "ratio"], coh_rows)
    cvals = [r[1] for r in coh_rows]
    cmed = float(np.median(cvals))
    rep.add_check(
        "coherent_witness_uniform",
        max(cvals) <= 1.5 * cmed and min(cvals) >= cmed / 1.5,
        f"coherent ratios {['%.4g' % v for v in cvals]}, median {cmed:.4g}",
    )
    return rep


# ------------------------------------------------------------------ trilinear


def run_trilinear(cfg: ExperimentConfig) -> ExperimentReport:
    """Fitted gain exponent of the trilinear shell interaction."""
    rep = ExperimentReport("trilinear", cfg.echo())
    N1s = cfg.get_int_list("n1_list")
    if not N1s:
        rep.note("empty sweep")
        return rep
    M = cfg.get_int("m", 64)
    n2 = cfg.get_int("n2", 2)
    n3 = cfg.get_int("n3", 2)
    samples = cfg.get_int("samples", 3)
    dt = cfg.get_float("dt", 0.05)
    rng = _rng(cfg)
    lattice = Lattice(M)
    rows = []
    xs, ys = [], []
    for N1 in N1s:
        vals = []
        factor = None
        for s in range(samples):
            f1 = _random_shell_field(lattice, N1, rng)
            f2 = _random_shell_field(lattice, n2, rng)
            f3 = _random_shell_field(lattice, n3, rng)
            res = trilinear_ratio(f1, f2, f3, (N1, n2, n3), dt=dt)
            vals.append(res.normalized)
            factor = res.rhs_factor
            rows.append((N1, s, res.normalized, res.rhs_factor))
        xs.append(factor)
        ys.append(float(np.exp(np.mean(np.log(vals)))))
    rep.add_table("sweep", ["N1", "sample", "normalized", "rhs_factor"], rows)
    rep.add_plot("gain", "sweep", "rhs_factor", "normalized", logx=True, logy=True)
    if len(xs) >= 3:
        fit = fit_loglog(xs, ys)
        rep.add_fit("delta_eff", fit)
        # 95% confidence interval on the fitted exponent
        n = len(xs)
        lx = np.log(xs)
        ss_res = float(np.sum(np.square(fit.residuals)))
        sxx = float(np.sum((lx - lx.mean()) ** 2))
        se = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 and sxx > 0 else math.inf
        half = float(stats.t.ppf(0.975, n - 2)) * se
        rep.add_table(
            "delta_interval",
            ["delta_eff", "ci_low", "ci_high"],
            [(fit.slope, fit.slope - half, fit.slope + half)],
        )
        rep.add_check(
            "delta_eff_positive",
            fit.slope > 0.0,
            f"delta_eff = {fit.slope:.4g} (95% interval +/- {half:.3g})",
        )
    else:
        rep.note("fewer than three sweep points, no exponent fit")
    return rep


# -------------------------------------------------------------- orthogonality


def run_orthogonality(cfg: ExperimentConfig) -> ExperimentReport:
    """Pairing decay along divergence ladders, plus the single-profile
    Pythagorean identity."""
    rep = ExperimentReport("orthogonality", cfg.echo())
    ds = cfg.get_float_list("d_list", [2.0, 5.0, 10.0, 20.0])
    N = cfg.get_int("n_a", 16)
    M = cfg.get_int("m", 128)
    sigma = cfg.get_float("profile.sigma", 1.9)
    ratio = cfg.get_float("scale_ratio", 2.0)
    variants = cfg.get_str_list("variants", ["space", "scale"])
    phi = gaussian_profile(sigma)
    lattice = Lattice(M)

    for variant in variants:
        frames_a, frames_b = [], []
        for d in ds:
            if variant == "space":
                # pure spatial separation: divergence = N * |x0|
                h = d / N / math.sqrt(3.0)
                frames_a.append(Frame(N, 0.0, (0.0, 0.0, 0.0)))
                frames_b.append(Frame(N, 0.0, (h, h, h)))
            elif variant == "scale":
                # fixed scale ratio, the rest of the divergence split
                # between a time offset and a spatial one (a pure-scale
                # ladder would need N_B/N_A = e^d, beyond any resolvable
                # lattice for d >= 5); the divergence maximum is attained
                # in the N_B ordering, which fixes the offsets exactly
                if d <= math.log(ratio):
                    raise ConfigError(f"divergence d = {d} below ln(scale_ratio)")
                gamma = cfg.get_float("remainder_space_fraction", 0.75)
                rest = d - math.log(ratio)
                t = (1.0 - gamma) * rest / (ratio * N) ** 2
                h = gamma * rest / (ratio * N) / math.sqrt(3.0)
                frames_a.append(Frame(N, 0.0, (0.0, 0.0, 0.0)))
                frames_b.append(Frame(ratio * N, t, (h, h, h)))
            else:
                raise ConfigError(f"unknown ladder variant {variant!r}")
        rows = orthogonality_decay(phi, phi, frames_a, frames_b, lattice)
        rep.add_table(
            f"ladder_{variant}",
            ["k", "divergence", "l2", "h1", "cubic", "truncated"],
            [(r.k, r.divergence, r.l2, r.h1, r.cubic, r.truncated) for r in rows],
        )
        for name in ("l2", "h1", "cubic"):
            vals = [getattr(r, name) for r in rows]
            ok = _monotone_decreasing(vals) and vals[-1] <= 0.1 * vals[0]
            rep.add_check(
                f"{name}_decay_{variant}",
                ok,
                ", ".join(format(v, ".4g") for v in vals),
            )

    # single-profile Pythagorean identity: defects vanish identically
    small = Lattice(cfg.get_int("m_pyth", 64))
    piece = make_profile(phi, Frame(4.0, 0.0, (0.0, 0.0, 0.0)), small)
    zero = TorusField(small, np.zeros_like(piece.values), 0.0)
    pyth = pythagorean_report(zero, [piece], zero)
    rel = pyth.relative()
    rep.add_table(
        "pythagorean",
        ["case", "l2_defect", "h1_defect", "l6_defect"],
        [("single", rel["l2"], rel["h1dot"], rel["l6"])],
    )
    rep.add_check(
        "single_profile_exact",
        max(abs(rel["l2"]), abs(rel["h1dot"]), abs(rel["l6"])) == 0.0,
        f"defects {rel}",
    )
    return rep


# ----------------------------------------------------------------------- hflf


def run_hflf(cfg: ExperimentConfig) -> ExperimentReport:
    """Schur row-sum scaling of the high-low interaction matrix."""
    rep = ExperimentReport("hflf", cfg.echo())
    Ns = cfg.get_int_list("n_list", [4, 8])
    Bs = cfg.get_int_list("b_list", [2, 4])
    if not Ns or not Bs:
        rep.note("empty sweep")
        return rep
    s_bn = cfg.get_int("p_max_scale_bn", 2)
    s_n = cfg.get_int("p_max_scale_n", 8)
    rows_out = []
    normalized = []
    for N in Ns:
        for B in Bs:
            P_max = s_bn * B * N + s_n * N
            best, rows = hflf_schur_sums(N, B, P_max)
            interior = [r.row_sum for r in rows if not r.flagged]
            interior_max = max(interior) if interior else 0.0
            flagged = sum(1 for r in rows if r.flagged)
            rows_out.append(
                (N, B, P_max, best, interior_max, interior_max / N**2, flagged, len(rows))
            )
            if interior_max > 0.0:
                normalized.append(interior_max / N**2)
    rep.add_table(
        "schur",
        [
            "N",
            "B",
            "P_max",
            "max_row_sum",
            "interior_max",
            "interior_max_over_N2",
            "flagged_rows",
            "total_rows",
        ],
        rows_out,
    )
    rep.add_plot("row_scaling", "schur", "N", "interior_max_over_N2", logx=True)
    if len(normalized) > 1:
        spread = max(normalized) / min(normalized)
        rep.add_check(
            "normalized_rows_factor_2",
            spread <= 2.0,
            f"interior max/N^2 spread across configs: {spread:.3g}",
        )
    elif not normalized:
        rep.note("all row sums vanished (band swallows the box)")
    fit_n = min(Ns)
    fit_b = min(Bs)
    fit = envelope_fit(fit_n, fit_b, min(6 * fit_n, 24))
    rep.add_table(
        "envelope",
        ["N", "B", "constant", "near_constant"],
        [(fit_n, fit_b, fit.constant, fit.near_constant)],
    )
    rep.note(
        "the envelope constant reflects the cutoff transform's stretched-"
        "exponential decay, which stays above the power-law envelope far "
        "into the tail; domination holds at the fitted constant"
    )
    return rep
