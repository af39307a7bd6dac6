use qwoa::problems::{
    generate_instance, CflpData, Family, KMeansData, ProblemData, ProblemInstance, QapData, SigmaMode, SizeParams,
};
use qwoa::{Error, Sense, SolutionSpace};

fn sizes() -> Vec<(Family, SizeParams)> {
    vec![
        (Family::Maxcut, SizeParams::new(8, 2)),
        (Family::Mis, SizeParams::new(8, 2)),
        (Family::KMeans, SizeParams::new(6, 3)),
        (Family::Cflp, SizeParams::new(6, 3)),
        (Family::Qap, SizeParams::new(5, 5)),
    ]
}

#[test]
fn objective_table_matches_direct_evaluation() {
    for (family, size) in sizes() {
        let inst = generate_instance(family, size, 4).unwrap();
        let table = inst.objective_table(&inst.lambda_f).unwrap();
        assert_eq!(table.len(), inst.space.len());
        for (i, x) in inst.space.iter().enumerate() {
            assert!((table[i] - inst.evaluate_fixed(&x)).abs() <= 1e-12 * table[i].abs().max(1.0), "{family}");
        }
    }
}

#[test]
fn brute_force_optimum_is_extreme() {
    for (family, size) in sizes() {
        let inst = generate_instance(family, size, 9).unwrap();
        let table = inst.objective_table(&inst.lambda_f).unwrap();
        let opt = inst.brute_force_optimum(&inst.lambda_f).unwrap();
        assert!(!opt.indices.is_empty());
        for &v in &table {
            match inst.sense() {
                Sense::Maximize => assert!(v <= opt.value + 1e-9),
                Sense::Minimize => assert!(v >= opt.value - 1e-9),
            }
        }
        for &i in &opt.indices {
            assert!((table[i] - opt.value).abs() <= 1e-9 * opt.value.abs().max(1.0));
        }
    }
}

#[test]
fn mis_penalties_make_optimum_valid() {
    for seed in 0..10 {
        let inst = generate_instance(Family::Mis, SizeParams::new(10, 2), seed).unwrap();
        let opt = inst.brute_force_optimum(&inst.lambda_f).unwrap();
        let valid = inst.validity_table();
        assert!(opt.indices.iter().all(|&i| valid[i]), "seed {seed}");
        // raw optimum selects every vertex whenever edges exist
        let raw = inst.brute_force_optimum(&inst.raw_lambda()).unwrap();
        assert_eq!(raw.value, 10.0);
    }
}

#[test]
fn cflp_infinite_capacity_is_plain_cost() {
    let inst = generate_instance(Family::Cflp, SizeParams::new(5, 3), 2).unwrap();
    let ProblemData::Cflp(mut data) = inst.data else { unreachable!() };
    data.capacities = vec![f64::INFINITY; data.k];
    let space = SolutionSpace::integer(5, 3).unwrap();
    for x in space.iter() {
        assert_eq!(data.evaluate(&x, &[2.0, 3.0, 0.4]), data.cost(&x));
    }
}

#[test]
fn cflp_double_load_penalty() {
    let data = CflpData {
        n: 3,
        k: 2,
        opening_costs: vec![2.0, 4.0],
        transport_costs: vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        demands: vec![1.0, 1.0, 2.0],
        capacities: vec![2.0, 10.0],
        reference: vec![1, 1, 1],
    };
    // load 4 on capacity 2: excess 2, ceil(excess / cap) = 1
    let x = [0, 0, 0];
    let cost = 4.0 + 2.0;
    let expected = cost + 1.0 * 3.0 * 1.0 + 0.5 * 1.0 * 2.0;
    assert!((data.penalised_cost(&x, &[1.0, 0.5]) - expected).abs() < 1e-12);
    assert!(!data.is_valid(&x));
    assert!(data.is_valid(&[0, 0, 1]));
}

#[test]
fn kmeans_strata_share_a_mean() {
    let inst = generate_instance(Family::KMeans, SizeParams::new(6, 3), 5).unwrap();
    let ProblemData::KMeans(data) = &inst.data else { unreachable!() };
    let mut sums = [0.0; 4];
    let mut counts = [0usize; 4];
    for x in inst.space.iter() {
        let (_, used) = data.raw(&x);
        sums[used] += data.evaluate(&x);
        counts[used] += 1;
    }
    let target = data.cluster_count_means()[3];
    for used in 1..=3 {
        assert!((sums[used] / counts[used] as f64 - target).abs() < 1e-9, "stratum {used}");
    }
}

#[test]
fn kmeans_rejects_bad_shapes() {
    assert!(KMeansData::new(vec![0.0; 5], 2, 2).is_err());
    assert!(KMeansData::new(vec![0.0; 4], 2, 3).is_err());
}

#[test]
fn qap_matches_naive_sum() {
    let inst = generate_instance(Family::Qap, SizeParams::new(5, 5), 13).unwrap();
    let ProblemData::Qap(QapData { n, distances, flows }) = &inst.data else { unreachable!() };
    let n = *n;
    for x in inst.space.iter().step_by(7) {
        let mut naive = 0.0;
        for i in 0..n {
            for j in 0..n {
                naive += flows[i * n + j] * distances[x[i] * n + x[j]];
            }
        }
        assert!((inst.evaluate_fixed(&x) - naive).abs() < 1e-12);
    }
}

#[test]
fn document_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("qwoa-problems-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (family, size) in sizes() {
        let inst = generate_instance(family, size, 17).unwrap();
        let path = dir.join(format!("{family}.json"));
        std::fs::write(&path, inst.to_json()).unwrap();
        let back = ProblemInstance::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.digest(), inst.digest());
        assert_eq!(back.objective_table(&back.lambda_f).unwrap(), inst.objective_table(&inst.lambda_f).unwrap());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn digest_depends_on_content_only() {
    let a = generate_instance(Family::Maxcut, SizeParams::new(8, 2), 1).unwrap();
    let b = generate_instance(Family::Maxcut, SizeParams::new(8, 2), 1).unwrap();
    let c = generate_instance(Family::Maxcut, SizeParams::new(8, 2), 2).unwrap();
    assert_eq!(a.digest(), b.digest());
    assert_ne!(a.digest(), c.digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn malformed_documents_are_rejected() {
    for text in ["", "{}", "[1,2]", r#"{"format":"qwoa-instance","version":99}"#] {
        assert!(matches!(ProblemInstance::from_json(text), Err(Error::Document(_) | Error::Json(_))), "{text}");
    }
}

#[test]
fn sampled_sigma_approaches_exhaustive() {
    let inst = generate_instance(Family::Maxcut, SizeParams::new(10, 2), 3).unwrap();
    let exact = inst.sigma_estimate(&inst.lambda_f, SigmaMode::Exhaustive).unwrap();
    let sampled = inst
        .sigma_estimate(&inst.lambda_f, SigmaMode::Sampled { samples: 20_000, seed: 1 })
        .unwrap();
    assert!((sampled - exact).abs() < 0.05 * exact);
}
