//! Acceptance criteria, one PASS/FAIL line each (run with `--nocapture` to
//! see them). Criteria whose stated values contradict exact verification are
//! reported as FAIL and listed in `KNOWN_FAILURES`; everything else must pass.

use std::collections::BTreeSet;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde_json::Value;

use egeq_core::chains::three_representations;
use egeq_core::congruence::{solve_congruence, verify_row, EMBEDDED_ROWS};
use egeq_core::exact_arith::{dy_add, dy_sub, invert_term, term_value, verify_solution};
use egeq_core::greedy::sweep;
use egeq_core::{DyadicRational, Rational, Solution};

/// Criterion ids expected to fail, with the reason.
const KNOWN_FAILURES: &[(&str, &str)] = &[
    (
        "1-k7-count",
        "five k=7 solutions verify exactly; a count of 3 cannot hold",
    ),
    ("7-class", "the stated residue fails the u=55 congruence"),
    ("7-subsets", "9 compatible 4-subsets, not 6"),
];

struct Check {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn egeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egeq"))
        .args(args)
        .output()
        .expect("run egeq")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let o = egeq(args);
    let v = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (v, o.status.code().unwrap_or(-1))
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let o = egeq(args);
    assert!(o.status.success() || o.status.code() == Some(3), "{args:?}");
    stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn listed(k: u64) -> Vec<(u64, Vec<u64>)> {
    let v: &[(u64, &[u64])] = match k {
        2 => &[(4, &[5, 6])],
        3 => &[
            (1, &[3, 6, 8]),
            (1, &[4, 5, 6]),
            (2, &[3, 6, 8]),
            (2, &[4, 5, 6]),
            (3, &[4, 6, 8]),
            (11, &[12, 13, 14]),
        ],
        4 => &[(9, &[10, 11, 13, 14]), (26, &[27, 28, 29, 30])],
        5 => &[
            (5, &[6, 7, 11, 13, 14]),
            (6, &[7, 8, 11, 13, 14]),
            (15, &[16, 17, 18, 21, 22]),
            (57, &[58, 59, 60, 61, 62]),
        ],
        6 => &[
            (4, &[5, 7, 8, 11, 13, 14]),
            (12, &[13, 14, 15, 20, 21, 24]),
            (13, &[14, 15, 16, 20, 21, 24]),
            (21, &[22, 23, 24, 26, 27, 32]),
            (120, &[121, 122, 123, 124, 125, 126]),
        ],
        7 => &[
            (1, &[4, 5, 7, 8, 11, 13, 14]),
            (2, &[4, 5, 7, 8, 11, 13, 14]),
            (7, &[8, 9, 11, 15, 20, 21, 24]),
            (18, &[19, 20, 21, 23, 26, 27, 32]),
            (247, &[248, 249, 250, 251, 252, 253, 254]),
        ],
        8 => &[
            (17, &[18, 19, 20, 22, 26, 29, 30, 32]),
            (19, &[20, 21, 22, 24, 26, 29, 30, 32]),
            (197, &[198, 199, 200, 201, 202, 203, 205, 206]),
            (502, &[503, 504, 505, 506, 507, 508, 509, 510]),
        ],
        _ => unreachable!(),
    };
    let mut out: Vec<_> = v.iter().map(|(n, a)| (*n, a.to_vec())).collect();
    out.sort();
    out
}

fn enumerated(k: u64) -> Vec<(u64, Vec<u64>)> {
    let mut out: Vec<_> = csv_rows(&["enumerate", &k.to_string(), "--format", "csv"])
        .into_iter()
        .map(|r| {
            let a = r[1].split(' ').map(|t| t.parse().unwrap()).collect();
            (r[0].parse().unwrap(), a)
        })
        .collect();
    out.sort();
    out
}

fn render(sols: &[(u64, Vec<u64>)]) -> String {
    sols.iter()
        .map(|(n, a)| format!("[{n},{a:?}]"))
        .collect::<Vec<_>>()
        .join(";")
}

fn criterion_1(out: &mut Vec<Check>) {
    let start = Instant::now();
    let mut pass = true;
    let mut counts = Vec::new();
    for k in 2..=6 {
        let got = enumerated(k);
        pass &= render(&got) == render(&listed(k));
        counts.push(got.len());
    }
    out.push(Check {
        id: "1",
        pass: pass && counts == [1, 6, 2, 4, 5] && start.elapsed() < Duration::from_secs(300),
        detail: format!("k=2..6 counts {counts:?} in {:?}", start.elapsed()),
    });

    let k7 = enumerated(7);
    out.push(Check {
        id: "1-k7-list",
        pass: k7 == listed(7),
        detail: format!("k=7 returns the five listed solutions: {}", render(&k7)),
    });
    out.push(Check {
        id: "1-k7-count",
        pass: k7.len() == 3,
        detail: format!("stated N(7)=3, enumerated and verified {}", k7.len()),
    });
    let k8 = enumerated(8);
    let extra: Vec<_> = k8
        .iter()
        .filter(|s| !listed(8).contains(s))
        .cloned()
        .collect();
    out.push(Check {
        id: "1-k8",
        pass: listed(8).iter().all(|s| k8.contains(s)),
        detail: format!(
            "k=8 contains the four listed; additional: {}",
            render(&extra)
        ),
    });
}

fn balances(n: u64, a: &[u64]) -> bool {
    let l = *a.last().unwrap();
    n <= l
        && (u128::from(n) << (l - n)) == a.iter().map(|&x| u128::from(x) << (l - x)).sum::<u128>()
}

fn criterion_2(out: &mut Vec<Check>) {
    let mut brute = Vec::new();
    // k = 2: n <= 4, a_2 <= 12; k = 3: n <= 11, a_3 <= 32
    for n in 1..=4u64 {
        for a1 in n + 1..=12 {
            for a2 in a1 + 1..=12 {
                if balances(n, &[a1, a2]) {
                    brute.push((n, vec![a1, a2]));
                }
            }
        }
    }
    for n in 1..=11u64 {
        for a1 in n + 1..=32 {
            for a2 in a1 + 1..=32 {
                for a3 in a2 + 1..=32 {
                    if balances(n, &[a1, a2, a3]) {
                        brute.push((n, vec![a1, a2, a3]));
                    }
                }
            }
        }
    }
    brute.sort();
    let mut got = enumerated(2);
    got.extend(enumerated(3));
    got.sort();
    out.push(Check {
        id: "2",
        pass: got == brute,
        detail: format!("{} solutions, brute force {}", got.len(), brute.len()),
    });
}

fn criterion_3(out: &mut Vec<Check>) {
    let rows = csv_rows(&["greedy", "--n", "41", "--max-k", "20", "--format", "csv"]);
    let terms: Vec<u64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let want = [42, 43, 44, 45, 47, 49, 54, 55, 56, 61, 66, 68, 69, 70];
    let (short, code) = json(&["greedy", "--n", "41", "--max-k", "10"]);
    out.push(Check {
        id: "3",
        pass: terms == want && code == 3 && short["status"] == "budget-exhausted",
        detail: format!(
            "max-k 20: {terms:?}; max-k 10: exit {code}, {}",
            short["status"]
        ),
    });
}

fn criteria_4_5(out: &mut Vec<Check>) {
    let start = Instant::now();
    let mut rows = csv_rows(&["sweep", "2", "2000", "--jobs", "4"]);
    rows.extend(csv_rows(&["sweep", "3113", "3113"]));
    let elapsed = start.elapsed();
    let parsed: Vec<(u64, u64, u64, bool)> = rows
        .iter()
        .map(|r| {
            (
                r[0].parse().unwrap(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
                r[3] == "true",
            )
        })
        .collect();
    let all_done = parsed.len() == 2000 && parsed.iter().all(|r| r.3);
    let find = |n| parsed.iter().find(|r| r.0 == n).map(|r| (r.1, r.2));
    out.push(Check {
        id: "4",
        pass: all_done
            && find(56) == Some((6092, 12230))
            && find(3113) == Some((13370, 29752))
            && elapsed < Duration::from_secs(600),
        detail: format!(
            "{} rows terminated={all_done}; n=56 -> {:?}; n=3113 -> {:?}; {elapsed:?}",
            parsed.len(),
            find(56),
            find(3113)
        ),
    });
    let bad: Vec<u64> = parsed
        .iter()
        .filter(|&&(n, k, ak, _)| !(k + n <= ak && ak <= 2 * (k + n)))
        .map(|r| r.0)
        .collect();
    out.push(Check {
        id: "5",
        pass: bad.is_empty(),
        detail: format!("window k+n <= a_k <= 2(k+n) violations (conjecture check): {bad:?}"),
    });
}

fn criterion_6(out: &mut Vec<Check>) {
    let want: &[(u64, u64, u64)] = &[
        (0, 4, 4),
        (1, 5, 12),
        (2, 22, 28),
        (3, 48, 60),
        (4, 83, 100),
        (6, 221, 508),
        (9, 242, 4092),
        (11, 5531, 16380),
        (17, 66328, 1048572),
        (21, 2796185, 5592404),
        (22, 775376, 1116130),
        (26, 96489490, 536870908),
    ];
    let got: Vec<(u64, u64, u64)> = csv_rows(&["table1", "--u-max", "26"])
        .iter()
        .map(|r| {
            (
                r[0].parse().unwrap(),
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
            )
        })
        .collect();
    let none_us: Vec<u64> = [5, 7, 8, 10]
        .into_iter()
        .chain(12..=16)
        .chain(18..=20)
        .chain(23..=25)
        .collect();
    let nones = none_us
        .iter()
        .all(|&u| solve_congruence(u).unwrap().is_none());
    let mut slowest = Duration::ZERO;
    let mut embedded = true;
    for e in &EMBEDDED_ROWS {
        let t = Instant::now();
        embedded &= verify_row(&e.row());
        slowest = slowest.max(t.elapsed());
    }
    out.push(Check {
        id: "6",
        pass: got == want && nones && embedded && slowest < Duration::from_secs(1),
        detail: format!(
            "{} computed rows match={}; none for {} u={}; embedded rows verified={embedded} (slowest {slowest:?})",
            got.len(),
            got == want,
            none_us.len(),
            nones
        ),
    });
}

fn criterion_7(out: &mut Vec<Check>) {
    let (four, _) = json(&["multiplicity", "--subset-size", "4"]);
    let (five, _) = json(&["multiplicity", "--subset-size", "5"]);
    let rows = four["rows"].as_array().unwrap();
    let sel = rows
        .iter()
        .find(|r| r["u_set"] == serde_json::json!([2, 9, 55, 99]))
        .unwrap();
    let residue = sel["residue"].as_str().unwrap();
    let modulus = sel["modulus"].as_str().unwrap();
    out.push(Check {
        id: "7-class",
        pass: residue == "10131316054712759135960334995313053617046"
            && modulus == "20263657997642451746458664712008831939580",
        detail: format!("rows {{2,9,55,99}} combine to {residue} (mod {modulus})"),
    });
    let sets: Vec<String> = rows.iter().map(|r| r["u_set"].to_string()).collect();
    out.push(Check {
        id: "7-subsets",
        pass: rows.len() == 6 && five["rows"].as_array().unwrap().is_empty(),
        detail: format!(
            "{} compatible 4-subsets {}; {} compatible 5-subsets",
            rows.len(),
            sets.join(" "),
            five["rows"].as_array().unwrap().len()
        ),
    });
}

fn criterion_8(out: &mut Vec<Check>) {
    use egeq_core::congruence::family_solution;
    let a = family_solution(0, 4).unwrap().unwrap();
    let b = family_solution(1, 5).unwrap().unwrap();
    let pass = a == Solution::new(9, vec![10, 11, 13, 14]).unwrap()
        && b == Solution::new(15, vec![16, 17, 18, 21, 22]).unwrap()
        && verify_solution(&a)
        && verify_solution(&b);
    out.push(Check {
        id: "8",
        pass,
        detail: format!("family (0,4) = {a}, (1,5) = {b}"),
    });
}

fn criterion_9(out: &mut Vec<Check>) {
    let five = csv_rows(&["chain", "8", "5"]);
    let pairs: Vec<(String, String)> = five.iter().map(|r| (r[1].clone(), r[2].clone())).collect();
    let want = [
        (13, 32),
        (9, 46),
        (169, 392),
        (5919, 12230),
        (71826, 155942),
    ];
    let want: Vec<(String, String)> = want
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    out.push(Check {
        id: "9",
        pass: pairs == want,
        detail: format!("chain 8 5: {pairs:?}"),
    });
    let start = Instant::now();
    let (deep, code) = json(&["chain", "8", "9", "--format", "json"]);
    let reps = deep["summary"]["representations"].as_u64().unwrap_or(0);
    out.push(Check {
        id: "9-depth9",
        pass: code == 0 && reps >= 9 && start.elapsed() < Duration::from_secs(3600),
        detail: format!(
            "chain 8 9: last step {}, certificate {reps} representations, {:?}",
            deep["rows"][8],
            start.elapsed()
        ),
    });
}

fn strip_volatile(mut v: Value) -> Value {
    let obj = v.as_object_mut().unwrap();
    obj.remove("timing_ms");
    obj["parameters"].as_object_mut().unwrap().remove("jobs");
    v
}

fn criterion_10(out: &mut Vec<Check>) {
    let inverts = (3..=10_000u64).all(|a| invert_term(&term_value(a).unwrap()) == Some(a));
    let mut roundtrip = true;
    for i in 1..500u64 {
        let x = DyadicRational::new(i * 7919 % 1013, i % 37);
        let y = DyadicRational::new(i * 104729 % 997, (i * 13) % 53);
        roundtrip &= dy_sub(&dy_add(&x, &y), &y).unwrap() == x;
    }
    let reps = three_representations(1, 17).unwrap();
    let target = reps[0].value().unwrap();
    let tail_ok = reps.iter().all(|rep| {
        let mut s = Rational::zero();
        for a in rep.truncated(200) {
            s = &s + &Rational::new(a, BigInt::from(1u8) << a).unwrap();
        }
        let gap = &target - &s;
        rep.value().unwrap() == target
            && gap.is_positive()
            && gap.mul_pow2(200) <= Rational::from_integer(1)
    });
    let feasible = sweep(2, 2000, 1 << 20, 4)
        .unwrap()
        .iter()
        .all(|r| r.feasible);
    let mut deterministic = true;
    for args in [
        vec!["enumerate", "6"],
        vec!["sweep", "2", "300", "--format", "json"],
    ] {
        let mut payloads = BTreeSet::new();
        for jobs in ["1", "4", "8"] {
            let mut a = args.clone();
            a.extend(["--jobs", jobs]);
            payloads.insert(strip_volatile(json(&a).0).to_string());
        }
        deterministic &= payloads.len() == 1;
    }
    out.push(Check {
        id: "10",
        pass: inverts && roundtrip && tail_ok && feasible && deterministic,
        detail: format!(
            "invert round trip {inverts}; add/sub {roundtrip}; tails to 2^-200 {tail_ok}; x_i < i+1 over n<=2000 {feasible}; jobs 1/4/8 identical {deterministic}"
        ),
    });
}

#[test]
fn acceptance() {
    let mut checks = Vec::new();
    criterion_1(&mut checks);
    criterion_2(&mut checks);
    criterion_3(&mut checks);
    criteria_4_5(&mut checks);
    criterion_6(&mut checks);
    criterion_7(&mut checks);
    criterion_8(&mut checks);
    criterion_9(&mut checks);
    criterion_10(&mut checks);

    let mut unexpected = Vec::new();
    for c in &checks {
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == c.id);
        let tag = if c.pass { "PASS" } else { "FAIL" };
        match (c.pass, known) {
            (false, Some((_, why))) => println!("{tag} criterion {}: {} [{why}]", c.id, c.detail),
            _ => println!("{tag} criterion {}: {}", c.id, c.detail),
        }
        if c.pass == known.is_some() {
            unexpected.push(c.id);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcomes: {unexpected:?}");
}
