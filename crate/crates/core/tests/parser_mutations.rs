use deteval::ingest::{parse_detection_line, parse_label_line, DETECTION_FIELDS, LABEL_FIELDS};
use deteval::IngestError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: &[&str] = &[
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59",
    "Pedestrian 0.27 1 0.21 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01",
    "Van 0.5 2 -1.9 0 180.5 95 260 2.1 1.9 5 -12.5 1.8 20 -1.6",
    "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10",
];
const DETECTIONS: &[&str] = &[
    "Car -1 -1 -10 385.29 177.21 427.54 203.35 -1 -1 -1 -1000 -1000 -1000 -10 0.91",
    "Cyclist 0.00 3 1.1 10 20 30.5 80 1.7 0.6 1.8 4 1.6 12 1.2 0.05",
];

// Digits, '.', and '-' are left out: edits with them can form a different
// but valid number, which no parser can tell apart from the original.
const NON_NUMERIC: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ,+#*/:_!%";
const WHITESPACE: &[u8] = b" \t\r";

fn mutate(line: &str, rng: &mut ChaCha8Rng) -> String {
    let mut bytes = line.as_bytes().to_vec();
    let class_end = line.find(' ').unwrap();
    loop {
        match rng.gen_range(0..5) {
            // Insert whitespace anywhere.
            0 => {
                let at = rng.gen_range(0..=bytes.len());
                bytes.insert(at, WHITESPACE[rng.gen_range(0..WHITESPACE.len())]);
            }
            // Swap a whitespace character for another.
            1 => {
                let at = rng.gen_range(0..bytes.len());
                if !bytes[at].is_ascii_whitespace() {
                    continue;
                }
                bytes[at] = WHITESPACE[rng.gen_range(0..WHITESPACE.len())];
            }
            // Delete a whitespace character.
            2 => {
                let at = rng.gen_range(0..bytes.len());
                if !bytes[at].is_ascii_whitespace() {
                    continue;
                }
                bytes.remove(at);
            }
            // Insert a non-numeric character past the class name.
            3 => {
                let at = rng.gen_range(class_end + 1..=bytes.len());
                bytes.insert(at, NON_NUMERIC[rng.gen_range(0..NON_NUMERIC.len())]);
            }
            // Overwrite any character past the class name.
            _ => {
                let at = rng.gen_range(class_end..bytes.len());
                bytes[at] = NON_NUMERIC[rng.gen_range(0..NON_NUMERIC.len())];
            }
        }
        return String::from_utf8(bytes).unwrap();
    }
}

fn tokens(s: &str) -> Vec<&str> {
    s.split_ascii_whitespace().collect()
}

#[test]
fn single_character_mutations_never_corrupt_silently() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b69_7474_69);
    let (mut identical, mut rejected) = (0, 0);
    for i in 0..10_000usize {
        let is_label = i % 3 != 0;
        let pool = if is_label { LABELS } else { DETECTIONS };
        let original = pool[rng.gen_range(0..pool.len())];
        let mutated = mutate(original, &mut rng);
        let line_no = i + 1;
        let same_tokens = tokens(original) == tokens(&mutated);
        let (result, fields) = if is_label {
            let want = parse_label_line(original, 1).unwrap();
            (parse_label_line(&mutated, line_no).map(|r| r == want), LABEL_FIELDS)
        } else {
            let want = parse_detection_line(original, 1).unwrap();
            (parse_detection_line(&mutated, line_no).map(|r| r == want), DETECTION_FIELDS)
        };
        match result {
            Ok(equal) => {
                assert!(same_tokens && equal, "accepted a corrupted line: {mutated:?}");
                identical += 1;
            }
            Err(IngestError::Parse { line, column, .. }) => {
                assert!(!same_tokens, "rejected a whitespace-only edit: {mutated:?}");
                assert_eq!(line, line_no);
                assert!((1..=fields + 1).contains(&column), "column {column} for {mutated:?}");
                rejected += 1;
            }
            Err(e) => panic!("unlocated error {e} for {mutated:?}"),
        }
    }
    assert_eq!(identical + rejected, 10_000);
    assert!(identical > 1000 && rejected > 1000, "{identical} / {rejected}");
}
