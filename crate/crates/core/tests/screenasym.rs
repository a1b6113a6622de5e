use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;
use tricoul::kinematics::Pair;
use tricoul::screenasym::*;
use tricoul::wavefn::{bbk_screen_factor, PLANE_WAVE_NORM};
use tricoul::{JacobiConfig, JacobiMomentum, Vec3};

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn inv_2pi_cubed() -> f64 {
    PLANE_WAVE_NORM * PLANE_WAVE_NORM
}

fn q0() -> JacobiMomentum {
    JacobiMomentum::new(Vec3::new(0.4, 0.9, -0.3), Vec3::new(-0.6, 0.2, 0.8))
}

fn unit3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-1.0f64..1.0).prop_filter_map("nonzero", |a| Vec3(a).unit())
}

#[test]
fn perpendicular_and_aligned_z() {
    let k2 = Vec3::new(1.0, 0.0, 0.0);
    let k3 = Vec3::new(0.0, 0.7, 0.0);
    let phat = Vec3::new(0.0, 0.0, 1.0);
    let c = screen_coeffs_from_parts(&k2, &k3, &Vec3::new(1.0, 0.0, 0.0), &phat, 1.0).unwrap();
    for z in [c.z2p, c.z2m, c.z3p, c.z3m] {
        assert!((z - 0.5 * SQRT3).abs() < 1e-15);
    }
    let c = screen_coeffs_from_parts(&k2, &k3, &Vec3::new(1.0, 0.0, 0.0), &k2, 1.0).unwrap();
    assert!((c.z2p - SQRT3).abs() < 1e-15 && c.z2m.abs() < 1e-15);
    assert!((c.b0.norm() - inv_2pi_cubed()).abs() < 1e-17);
    assert!((c.omega - (0.5 + 1.0 / 1.4)).abs() < 1e-15);
}

#[test]
fn free_weak_amplitudes() {
    let z = JacobiConfig::new(Vec3::new(1.0, 2.0, 0.5), Vec3::new(30.0, -40.0, 10.0));
    let q = q0();
    let (ain, aout) = psi1_weak_amplitudes(&z, &q, Pair::One, 0.0).unwrap();
    let (y, p) = (z.y.norm(), q.p.norm());
    let base = C::new(0.0, -2.0 * PI / (y * p)) * inv_2pi_cubed();
    assert!((ain - (-base * C::from_polar(1.0, -y * p))).norm() < 1e-15 * base.norm() * 10.0);
    assert!((aout - base * C::from_polar(1.0, y * p)).norm() < 1e-15 * base.norm() * 10.0);
    let (ain, aout) = psi1_weak_amplitudes(&z, &q, Pair::Two, 1.0).unwrap();
    assert!((ain.norm() - aout.norm()).abs() < 1e-14 * ain.norm());
}

#[test]
fn weak_amplitude_log_domain() {
    // x/y large enough to push Z + (x/2y)V negative is reported
    let q = JacobiMomentum::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0));
    let (s2, _) = Pair::One.spectators();
    let k2h = q.frame(s2).0.unit().unwrap();
    let xhat = (Vec3::ZERO - k2h - Vec3::new(1.0, 0.0, 0.0)).unit().unwrap();
    let z = JacobiConfig::new(xhat * 1e3, Vec3::new(-1.0, 0.0, 0.0));
    assert!(matches!(psi1_weak_amplitudes(&z, &q, Pair::One, 1.0), Err(tricoul::Error::Domain(_))));
}

/// `∫ Ψ_1(x, Y ŷ) f(ŷ) dŷ` over a cap of half-angle `theta_c` around `-p̂` with a smooth bump `f`.
fn cap_average(x: Vec3, q: &JacobiMomentum, big_y: f64, theta_c: f64) -> C {
    let c = (Vec3::ZERO - q.p).unit().unwrap();
    let seed = Vec3::new(1.0, 0.0, 0.0);
    let e1 = (seed - c * seed.dot(&c)).unit().unwrap();
    let e2 = c.cross(&e1);
    let (nodes, weights) = gauss_legendre(400);
    let u0 = theta_c.cos();
    let mut acc = C::new(0.0, 0.0);
    let nphi = 48;
    for (&t, &w) in nodes.iter().zip(&weights) {
        let u = u0 + (1.0 - u0) * 0.5 * (t + 1.0);
        let theta = u.clamp(-1.0, 1.0).acos();
        let s = theta / theta_c;
        let bump = if s < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
        if bump == 0.0 {
            continue;
        }
        let sn = theta.sin();
        let mut ring = C::new(0.0, 0.0);
        for m in 0..nphi {
            let phi = 2.0 * PI * m as f64 / nphi as f64;
            let yhat = c * u + e1 * (sn * phi.cos()) + e2 * (sn * phi.sin());
            let z = JacobiConfig::new(x, yhat * big_y);
            ring += bbk_screen_factor(&z, q, Pair::One, 1.0).unwrap().1;
        }
        acc += ring * (2.0 * PI / nphi as f64) * bump * (w * 0.5 * (1.0 - u0));
    }
    acc
}

#[test]
fn weak_amplitude_matches_cap_average() {
    let q = q0();
    let x = Vec3::new(1.2, -2.0, 1.5);
    let mismatch = |big_y: f64| {
        let avg = cap_average(x, &q, big_y, 0.6);
        let z = JacobiConfig::new(x, (Vec3::ZERO - q.p).unit().unwrap() * big_y);
        let (ain, _) = psi1_weak_amplitudes(&z, &q, Pair::One, 1.0).unwrap();
        (avg / ain - 1.0).norm()
    };
    let (m2, m3) = (mismatch(100.0), mismatch(1000.0));
    assert!(m3 < m2 && m3 < 0.05, "{m2} {m3}");
}

#[test]
fn rkernel_perpendicular_b0() {
    let k = Vec3::new(0.0, 0.0, 1.0);
    let p = Vec3::new(0.0, 0.0, 0.8);
    let k2 = Vec3::new(1.2, 0.0, 0.0);
    let k3 = Vec3::new(0.0, 0.5, 0.0);
    let r = rkernel_coeffs_from_parts(&k, &p, &k2, &k3, 1.0).unwrap();
    let (e2, e3) = (1.0 / 2.4, 1.0);
    let want = C::from_polar(inv_2pi_cubed(), (e2 + e3) * (0.5 * SQRT3).ln() + e2 * 1.2f64.ln() + e3 * 0.5f64.ln());
    assert!((r.b0_in - want).norm() < 1e-15);
    assert!((r.b0_in.norm() - inv_2pi_cubed()).abs() < 1e-17);
}

#[test]
fn rkernel_omega_near_alignment() {
    let k = Vec3::new(0.0, 1.0, 0.0);
    let k2 = Vec3::new(0.0, 0.0, 1.0);
    let k3 = Vec3::new(1.0, 0.0, 0.0);
    let eta2 = 0.5;
    for eps in [1e-4f64, 1e-6, 1e-8] {
        // angle between p̂ and k̂_2 is about sqrt(2 eps)
        let th = (2.0 * eps).sqrt();
        let p = Vec3::new(0.0, th.sin(), th.cos());
        let r = rkernel_coeffs_from_parts(&k, &p, &k2, &k3, 1.0).unwrap();
        let c = 1.0 - th.cos();
        let lead = eta2 * (2.0f64 / 3.0).sqrt();
        let got = r.omega_in.norm() * c.sqrt();
        assert!((got - lead).abs() < 2.0 * th + 1e-9, "eps {eps}: {got} vs {lead}");
    }
    let p = k2;
    assert!(matches!(rkernel_coeffs_from_parts(&k, &p, &k2, &k3, 1.0), Err(tricoul::Error::Singular(_))));
}

#[test]
fn rkernel_orthogonality_diagnostic() {
    let q = q0();
    let r = rkernel_coeffs(&q, Pair::One, 1.0).unwrap();
    let (bin, bout) = r.projected();
    assert!(bin.dot(&r.khat).abs() < 1e-15 && bout.dot(&r.khat).abs() < 1e-15);
    // with Jacobi-related spectator momenta the literal B_in is already orthogonal to k̂
    assert!(r.b_in_along_k().abs() < 1e-13, "{}", r.b_in_along_k());
    assert!(r.b_out_along_k().abs() > 1e-3);
    assert!(r.b_out_flipped().dot(&r.khat).abs() < 1e-13);
    // not so for unrelated spectator momenta
    let (s2, s3) = Pair::One.spectators();
    let swapped = rkernel_coeffs_from_parts(&q.k, &q.p, &q.frame(s3).0, &q.frame(s2).0, 1.0).unwrap();
    assert!(swapped.b_in_along_k().abs() > 1e-3);
}

#[test]
fn resonant_coupling_rejected() {
    // a = ω - 2α/(√3 p) = 0
    let k2 = Vec3::new(1.0, 0.0, 0.0);
    let k3 = Vec3::new(0.0, 1.0, 0.0);
    let pn = 2.0 / (SQRT3 * 1.0);
    let p = Vec3::new(0.0, 0.0, pn);
    let r = rkernel_coeffs_from_parts(&Vec3::new(0.3, 0.3, 0.3), &p, &k2, &k3, 1.0);
    assert!(matches!(r, Err(tricoul::Error::Singular(_))), "{r:?}");
}

#[test]
fn gauss_legendre_exactness() {
    let (x, w) = gauss_legendre(20);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
    assert!((m - 2.0 / 39.0).abs() < 1e-14);
    let (x, w) = gauss_legendre(2001);
    let m: f64 = x.iter().zip(&w).map(|(x, w)| w * (30.0 * x).cos()).sum();
    assert!((m - 2.0 * 30f64.sin() / 30.0).abs() < 1e-13);
}

#[test]
fn free_sphere_integral() {
    let k = Vec3::new(0.3, -0.4, 1.2);
    for x in [7.0, 55.0] {
        let got = sphere_integral(&k, 0.0, x, &|_| C::new(1.0, 0.0)).unwrap();
        let kx = k.norm() * x;
        let want = 4.0 * PI * kx.sin() / kx * PLANE_WAVE_NORM;
        assert!((got.re - want).abs() < 1e-10 * PLANE_WAVE_NORM && got.im.abs() < 1e-10 * PLANE_WAVE_NORM);
    }
}

#[test]
fn weak_limit_converges() {
    let k = Vec3::new(0.0, 0.6, 0.8);
    let f = |v: Vec3| C::new(1.0 + 0.3 * v[0] - 0.2 * v[1] * v[2], 0.1 * v[2]);
    let recs = twobody_weak_check(&k, 1.0, &[200.0, 800.0], &f, false).unwrap();
    assert!(recs[1].rel_mismatch * 2.0 <= recs[0].rel_mismatch, "{} {}", recs[0].rel_mismatch, recs[1].rel_mismatch);
    assert!(recs[1].rel_mismatch < 0.02);
}

#[test]
fn weak_limit_outgoing_with_forward_free_test_function() {
    let k = Vec3::new(0.0, 0.0, 1.0);
    // supported on <x̂, k̂> < 0.9, smooth
    let f = |v: Vec3| {
        let u = v[2];
        if u < 0.9 {
            C::new((-(1.0 / (0.9 - u))).exp() * 10.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    };
    let recs = twobody_weak_check(&k, 1.0, &[150.0, 600.0], &f, true).unwrap();
    let out =
        |r: &WeakCheckRecord| (r.extracted_out - r.predicted_out.unwrap()).norm() / r.predicted_out.unwrap().norm();
    assert!(out(&recs[1]) < out(&recs[0]), "{} {}", out(&recs[0]), out(&recs[1]));
    assert!(out(&recs[1]) < 0.05, "{}", out(&recs[1]));
}

#[test]
fn weak_limit_without_stationary_points() {
    // support away from both poles: no incoming delta; the outgoing part is pure Coulomb scattering
    let k = Vec3::new(1.0, 0.0, 0.0);
    let f = |v: Vec3| {
        let u = v[0];
        if u.abs() < 0.5 {
            C::new((1.0 - 1.0 / (1.0 - 4.0 * u * u)).exp(), 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    };
    let recs = twobody_weak_check(&k, 1.0, &[100.0, 400.0], &f, true).unwrap();
    let unit = PLANE_WAVE_NORM * 2.0 * PI;
    assert!(recs[1].extracted_in.norm() < recs[0].extracted_in.norm());
    assert!(recs[1].extracted_in.norm() < 1e-3 * unit, "{}", recs[1].extracted_in.norm());
    let b = recs[1].predicted_out.unwrap();
    assert!((recs[1].extracted_out - b).norm() < 0.01 * b.norm());
    let free = twobody_weak_check(&k, 0.0, &[100.0, 400.0], &f, true).unwrap();
    let size = |r: &WeakCheckRecord| r.extracted_in.norm() + r.extracted_out.norm();
    assert!(size(&free[1]) < size(&free[0]) && size(&free[1]) < 1e-4 * unit);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn z_sums_and_sign_swap(k2 in unit3(), k3 in unit3(), x in unit3(), p in unit3(), s2 in 0.2f64..3.0, s3 in 0.2f64..3.0) {
        let a = screen_coeffs_from_parts(&(k2 * s2), &(k3 * s3), &x, &p, 1.0).unwrap();
        let b = screen_coeffs_from_parts(&(k2 * s2), &(k3 * s3), &x, &(Vec3::ZERO - p), 1.0).unwrap();
        prop_assert!((a.z2p + a.z2m - SQRT3).abs() < 1e-14);
        prop_assert!((a.z3p + a.z3m - SQRT3).abs() < 1e-14);
        prop_assert!((a.z2p - b.z2m).abs() < 1e-15 && (a.v2p - b.v2m).abs() < 1e-15);
        prop_assert!((a.z3p - b.z3m).abs() < 1e-15 && (a.v3p - b.v3m).abs() < 1e-15);
        prop_assert!((a.b0.norm() - inv_2pi_cubed()).abs() < 1e-16);
    }

    #[test]
    fn jacobi_kinematics_make_b_in_orthogonal(k in unit3(), p in unit3(), sk in 0.2f64..3.0, sp in 0.2f64..3.0) {
        let q = JacobiMomentum::new(k * sk, p * sp);
        prop_assume!(q.clear_of_screens(0.1));
        for j in Pair::ALL {
            if let Ok(r) = rkernel_coeffs(&q, j, 1.0) {
                let scale = r.b_in.norm() + r.omega_in.norm() / (r.a.abs() * r.k);
                prop_assert!(r.b_in_along_k().abs() <= 1e-12 * scale);
                let scale = r.b_out.norm() + r.omega_out.norm() / (r.b.abs() * r.k);
                prop_assert!(r.b_out_flipped().dot(&r.khat).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn rkernel_identities(k in unit3(), p in unit3(), k2 in unit3(), k3 in unit3(),
                          sk in 0.2f64..3.0, sp in 0.2f64..3.0, s2 in 0.2f64..3.0, s3 in 0.2f64..3.0) {
        let (k, p, k2, k3) = (k * sk, p * sp, k2 * s2, k3 * s3);
        let a = rkernel_coeffs_from_parts(&k, &p, &k2, &k3, 1.0);
        let b = rkernel_coeffs_from_parts(&k, &(Vec3::ZERO - p), &k2, &k3, 1.0);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a.a + a.b - 2.0 * a.omega).abs() < 1e-13);
            prop_assert!((a.b0_in.norm() - inv_2pi_cubed()).abs() < 1e-16);
            prop_assert!((a.b0_out.norm() - inv_2pi_cubed()).abs() < 1e-16);
            prop_assert!((a.b0_in - b.b0_out).norm() < 1e-16);
            prop_assert!((a.b0_out - b.b0_in).norm() < 1e-16);
            let scale = 1.0 + a.omega_in.norm() + a.omega_out.norm();
            prop_assert!((a.omega_in - b.omega_out).norm() < 1e-12 * scale);
            prop_assert!((a.omega_out - b.omega_in).norm() < 1e-12 * scale);
        }
    }
}
