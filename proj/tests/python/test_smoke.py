"""Smoke checks for the python bindings; plain asserts, no test framework."""

import math

import grfkit


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    # Hermite evaluation against the closed form of the ground state.
    assert close(grfkit.hermite_eval(0, 0.0), math.pi ** -0.25, 1e-15)
    vals = grfkit.hermite_all(5, 0.7)
    assert close(vals[0], grfkit.hermite_eval(0, 0.7), 1e-15)
    assert close(vals[3], grfkit.hermite_eval(3, 0.7), 1e-14)

    # Quadrature: weights sum to sqrt(pi), transform of the ground state.
    rule = grfkit.gauss_hermite_rule(24)
    assert close(sum(rule.weights()), math.sqrt(math.pi), 1e-12)
    a = grfkit.hermite_transform(lambda x: math.exp(-0.5 * x[0] ** 2), 1, 6, 24)
    assert close(a[0], math.pi ** 0.25, 1e-12)
    assert all(abs(a[i]) < 1e-12 for i in range(1, len(a)))
    assert close(
        grfkit.hermite_reconstruct(a, [0.33]), math.exp(-0.5 * 0.33 ** 2), 1e-12
    )
    assert close(grfkit.integrate(lambda x: math.exp(-x[0] ** 2), 1, 20),
                 math.sqrt(math.pi), 1e-12)

    # Norms, duality, pairing.
    b = grfkit.TruncatedSeq(1, 1, [3.0, 4.0])
    assert close(grfkit.norm_p(b, 0), 5.0)
    assert close(grfkit.norm_p(b, 1), math.sqrt(9.0 + 4.0 * 16.0))
    assert close(grfkit.dual_norm(b, 1), grfkit.norm_p(b, -1))
    astar = grfkit.dual_maximizer(b, 1)
    assert close(grfkit.norm_p(astar, 1), 1.0)
    assert close(grfkit.pairing(b, astar), grfkit.dual_norm(b, 1))
    assert close(grfkit.zeta_const(2), math.pi ** 2 / 6.0, 1e-12)
    holds, prefix_only = grfkit.check_envelope(b, 2, 4.0)
    assert holds and prefix_only
    assert close(grfkit.envelope_norm_bound(0, 2.0, 2), 2.0 * grfkit.zeta_const(2))

    # Sampling is reproducible and matches the declared covariance shape.
    spec = grfkit.FieldSpec.power_decay(1, 4, 1)
    assert close(spec.variance(2), (1 + 2) ** -2)
    s1 = grfkit.sample_field(spec, seed=11, stream_id=3)
    s2 = grfkit.sample_field(spec, seed=11, stream_id=3)
    assert s1 == s2
    batch = grfkit.sample_batch(spec, 11, 0, 500, threads=2)
    assert len(batch) == 500 and batch[0] == grfkit.sample_field(spec, 11, 0)

    # Characteristic functionals: exact vs empirical within Monte-Carlo error.
    point = grfkit.TruncatedSeq.unit(1, 4, [0])
    exact = grfkit.gaussian_charfun_exact(spec, point)
    assert close(exact.real, math.exp(-0.5), 1e-15) and exact.imag == 0.0
    est = grfkit.empirical_charfun(batch, [point], threads=2)
    assert abs(est.values[0] - exact) < 5.0 / math.sqrt(500)
    assert est.std_errors[0] <= 1.0 / math.sqrt(500) + 1e-15

    gram = grfkit.gram_psd_check_exact(spec, [point, grfkit.scale(point, 2.0)], 1e-10)
    assert gram.pass_
    gram_emp = grfkit.gram_psd_check_empirical(batch, [point, grfkit.scale(point, 2.0)])
    assert gram_emp.pass_

    # Tail-bound check on white noise passes with the stated constants.
    white = grfkit.FieldSpec.white(1, 16)
    wbatch = grfkit.sample_batch(white, 2024, 0, 2000, threads=2)
    report = grfkit.minlos_tail_check(wbatch, 0, 1, [0.5, 1.0], eps=0.0, c=0.5)
    assert report.all_pass and close(report.zeta_value, grfkit.zeta_const(2))
    assert len(report.rows) == 2 and report.hypothesis_note

    # Convergence harness positive control at small scale.
    seqs = [grfkit.FieldSpec.white(1, n) for n in (2, 4, 8)]
    limit = grfkit.FieldSpec.white(1, 8)
    bank = grfkit.default_bank(1, 8, seed=99)
    conv = grfkit.equivalence_experiment(
        seqs, limit, bank, 1500, seed=99, kappa_grid=[1.0, 5.0], threads=2
    )
    assert conv.charfun_converged and conv.pairing_converged
    assert conv.tightness_pass and not conv.hypothesis_violated

    # KS and the asymptotic critical point.
    g = grfkit.CounterRng(7, 0)
    normals = [g.normal(i) for i in range(400)]
    ks = grfkit.ks_pairing_test(
        normals, lambda x: 0.5 * math.erfc(-x / math.sqrt(2)), alpha=0.01
    )
    assert ks.pass_ and close(
        ks.critical, grfkit.kolmogorov_critical(0.01) / math.sqrt(400), 1e-12
    )
    assert close(grfkit.bridging_constant(), 2.0001036638116815, 1e-12)

    # Capacity is enforced, not silently clipped.
    try:
        grfkit.gauss_hermite_rule(513)
    except grfkit.CapacityError:
        pass
    else:
        raise AssertionError("order cap was not enforced")

    print("python smoke ok")


if __name__ == "__main__":
    main()
