//! Seeded synthetic hospital data in a nine-table (normalized) and a
//! five-table (merged) shape, plus built-in query templates for both.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::query::ColumnRef;
use crate::relational::{Database, LoadError, Row};
use crate::schema::{ColumnSpec, SchemaManifest, TableSpec};
use crate::transpile::ColumnMapping;
use crate::value::{CellValue, DataType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureSchema {
    FiveTable,
    NineTable,
}

impl FromStr for FixtureSchema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "five" | "five_table" | "five-table" | "5" => Ok(FixtureSchema::FiveTable),
            "nine" | "nine_table" | "nine-table" | "9" => Ok(FixtureSchema::NineTable),
            other => Err(format!("unknown schema `{other}` (expected five_table or nine_table)")),
        }
    }
}

impl fmt::Display for FixtureSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureSchema::FiveTable => "five_table",
            FixtureSchema::NineTable => "nine_table",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureSpec {
    pub n_patients: usize,
    pub seed: u64,
    pub schema: FixtureSchema,
}

/// Generated rows, aligned with the manifest's declared columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub manifest: SchemaManifest,
    pub rows: BTreeMap<String, Vec<Row>>,
}

const NAMES: &[&str] = &[
    "john", "mary", "james", "patricia", "robert", "jennifer", "michael", "linda", "william", "elizabeth", "david",
    "barbara", "richard", "susan", "joseph", "jessica", "thomas", "sarah", "charles", "karen",
];
const ADMISSION_TYPES: &[&str] = &["emergency", "elective", "urgent", "newborn"];
const INSURANCE: &[&str] = &["medicare", "medicaid", "private", "government", "self pay"];
const LOCATIONS: &[&str] = &[
    "emergency room admit",
    "phys referral/normal deli",
    "transfer from hosp/extram",
    "clinic referral/premature",
];
const DIAGNOSES: &[(&str, &str, &str)] = &[
    ("4019", "hypertension nos", "unspecified essential hypertension"),
    ("41401", "crnry athrscl natve vssl", "coronary atherosclerosis of native coronary artery"),
    ("42731", "atrial fibrillation", "atrial fibrillation"),
    ("4280", "chf nos", "congestive heart failure, unspecified"),
    ("25000", "dmii wo cmp nt st uncntr", "diabetes mellitus without mention of complication"),
    ("5849", "acute kidney failure nos", "acute kidney failure, unspecified"),
    ("51881", "acute respiratry failure", "acute respiratory failure"),
    ("2724", "hyperlipidemia nec/nos", "other and unspecified hyperlipidemia"),
];
const PROCEDURES: &[(&str, &str, &str)] = &[
    ("3893", "venous cath nec", "venous catheterization, not elsewhere classified"),
    ("9604", "insert endotracheal tube", "insertion of endotracheal tube"),
    ("9671", "cont inv mec ven <96 hrs", "continuous invasive mechanical ventilation for less than 96 consecutive hours"),
    ("3961", "extracorporeal circulat", "extracorporeal circulation auxiliary to open heart surgery"),
    ("9904", "packed cell transfusion", "transfusion of packed cells"),
    ("3722", "left heart cardiac cath", "left heart cardiac catheterization"),
];
const DRUGS: &[&str] = &[
    "antihypertensive",
    "sodium chloride 0.9%",
    "potassium chloride",
    "insulin",
    "heparin sodium",
    "acetaminophen",
    "metoprolol tartrate",
    "furosemide",
    "magnesium sulfate",
    "docusate sodium",
];
const DRUG_TYPES: &[&str] = &["main", "base", "additive"];
const ROUTES: &[&str] = &["iv", "po", "sc", "ih", "iv drip"];
const LAB_ITEMS: &[(i64, &str, &str, &str)] = &[
    (50912, "creatinine", "blood", "chemistry"),
    (50971, "potassium", "blood", "chemistry"),
    (51221, "hematocrit", "blood", "hematology"),
    (51222, "hemoglobin", "blood", "hematology"),
    (50931, "glucose", "blood", "chemistry"),
    (51301, "white blood cells", "blood", "hematology"),
    (51491, "ph", "urine", "hematology"),
];
const LAB_FLAGS: &[&str] = &["normal", "abnormal", "delta"];

fn pk(n: &str) -> ColumnSpec {
    ColumnSpec::primary_key(n, DataType::Integer)
}

fn fk(n: &str, parent: &str) -> ColumnSpec {
    ColumnSpec::foreign_key(n, parent, DataType::Integer)
}

fn text(n: &str) -> ColumnSpec {
    ColumnSpec::property(n, DataType::Text)
}

fn int(n: &str) -> ColumnSpec {
    ColumnSpec::property(n, DataType::Integer)
}

fn float(n: &str) -> ColumnSpec {
    ColumnSpec::property(n, DataType::Float)
}

/// Normalized shape: every dictionary table hangs below the event it
/// describes, so the table graph is a tree of depth four.
pub fn nine_table_manifest() -> SchemaManifest {
    SchemaManifest::new(vec![
        TableSpec::new("patients", vec![pk("subject_id"), text("name"), text("gender"), int("dob"), int("expire_flag")]),
        TableSpec::new(
            "admissions",
            vec![
                pk("hadm_id"),
                fk("subject_id", "patients"),
                int("age"),
                text("admission_type"),
                text("insurance"),
                int("admityear"),
                int("days_stay"),
                text("admission_location"),
            ],
        ),
        TableSpec::new("diagnoses", vec![pk("diag_id"), fk("hadm_id", "admissions"), text("icd9_code"), int("seq_num")]),
        TableSpec::new("d_icd_diagnoses", vec![fk("diag_id", "diagnoses"), text("short_title"), text("long_title")]),
        TableSpec::new("procedures", vec![pk("proc_id"), fk("diag_id", "diagnoses"), text("proc_code")]),
        TableSpec::new(
            "d_icd_procedures",
            vec![fk("proc_id", "procedures"), text("proc_short_title"), text("proc_long_title")],
        ),
        TableSpec::new(
            "prescriptions",
            vec![
                fk("hadm_id", "admissions"),
                text("drug"),
                text("drug_type"),
                float("dose_val_rx"),
                text("route"),
                int("timestep"),
            ],
        ),
        TableSpec::new("lab", vec![pk("lab_id"), fk("hadm_id", "admissions"), int("itemid"), float("value_num"), text("flag")]),
        TableSpec::new("d_labitems", vec![fk("lab_id", "lab"), text("label"), text("fluid"), text("category")]),
    ])
    .expect("built-in manifest is valid")
}

/// Merged shape: patients and admissions fold into `demographic`, each
/// dictionary folds into its event table.
pub fn five_table_manifest() -> SchemaManifest {
    SchemaManifest::new(vec![
        TableSpec::new(
            "demographic",
            vec![
                pk("hadm_id"),
                int("subject_id"),
                text("name"),
                text("gender"),
                int("dob"),
                int("expire_flag"),
                int("age"),
                text("admission_type"),
                text("insurance"),
                int("admityear"),
                int("days_stay"),
                text("admission_location"),
            ],
        ),
        TableSpec::new(
            "diagnoses",
            vec![fk("hadm_id", "demographic"), text("icd9_code"), int("seq_num"), text("short_title"), text("long_title")],
        ),
        TableSpec::new(
            "procedures",
            vec![fk("hadm_id", "demographic"), text("proc_code"), text("proc_short_title"), text("proc_long_title")],
        ),
        TableSpec::new(
            "prescriptions",
            vec![
                fk("hadm_id", "demographic"),
                text("drug"),
                text("drug_type"),
                float("dose_val_rx"),
                text("route"),
                int("timestep"),
            ],
        ),
        TableSpec::new(
            "lab",
            vec![
                fk("hadm_id", "demographic"),
                int("itemid"),
                float("value_num"),
                text("flag"),
                text("label"),
                text("fluid"),
                text("category"),
            ],
        ),
    ])
    .expect("built-in manifest is valid")
}

/// Column mapping from the five-table shape to the nine-table shape. The
/// synthetic `row_id` of every merged event table maps to the key of the
/// corresponding normalized event.
pub fn five_to_nine_mapping() -> ColumnMapping {
    let pairs: &[(&str, &str)] = &[
        ("demographic.hadm_id", "admissions.hadm_id"),
        ("demographic.subject_id", "patients.subject_id"),
        ("demographic.name", "patients.name"),
        ("demographic.gender", "patients.gender"),
        ("demographic.dob", "patients.dob"),
        ("demographic.expire_flag", "patients.expire_flag"),
        ("demographic.age", "admissions.age"),
        ("demographic.admission_type", "admissions.admission_type"),
        ("demographic.insurance", "admissions.insurance"),
        ("demographic.admityear", "admissions.admityear"),
        ("demographic.days_stay", "admissions.days_stay"),
        ("demographic.admission_location", "admissions.admission_location"),
        ("diagnoses.row_id", "diagnoses.diag_id"),
        ("diagnoses.hadm_id", "diagnoses.hadm_id"),
        ("diagnoses.icd9_code", "diagnoses.icd9_code"),
        ("diagnoses.seq_num", "diagnoses.seq_num"),
        ("diagnoses.short_title", "d_icd_diagnoses.short_title"),
        ("diagnoses.long_title", "d_icd_diagnoses.long_title"),
        ("procedures.row_id", "procedures.proc_id"),
        ("procedures.hadm_id", "diagnoses.hadm_id"),
        ("procedures.proc_code", "procedures.proc_code"),
        ("procedures.proc_short_title", "d_icd_procedures.proc_short_title"),
        ("procedures.proc_long_title", "d_icd_procedures.proc_long_title"),
        ("prescriptions.row_id", "prescriptions.row_id"),
        ("prescriptions.hadm_id", "prescriptions.hadm_id"),
        ("prescriptions.drug", "prescriptions.drug"),
        ("prescriptions.drug_type", "prescriptions.drug_type"),
        ("prescriptions.dose_val_rx", "prescriptions.dose_val_rx"),
        ("prescriptions.route", "prescriptions.route"),
        ("prescriptions.timestep", "prescriptions.timestep"),
        ("lab.row_id", "lab.lab_id"),
        ("lab.hadm_id", "lab.hadm_id"),
        ("lab.itemid", "lab.itemid"),
        ("lab.value_num", "lab.value_num"),
        ("lab.flag", "lab.flag"),
        ("lab.label", "d_labitems.label"),
        ("lab.fluid", "d_labitems.fluid"),
        ("lab.category", "d_labitems.category"),
    ];
    let split = |s: &str| {
        let (t, c) = s.split_once('.').expect("table.column");
        ColumnRef::new(t, c)
    };
    ColumnMapping { entries: pairs.iter().map(|(a, b)| (split(a), split(b))).collect() }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty vocabulary")
}

fn t(s: &str) -> CellValue {
    CellValue::text(s)
}

fn generate_nine(n_patients: usize, seed: u64) -> BTreeMap<String, Vec<Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    let mut push = |name: &str, row: Row| tables.entry(name.to_string()).or_default().push(row);
    let (mut hadm, mut diag, mut proc, mut lab) = (100_000i64, 1i64, 1i64, 1i64);
    let i = CellValue::Integer;
    for p in 0..n_patients {
        let subject = 10_000 + p as i64;
        push(
            "patients",
            vec![
                i(subject),
                t(pick(&mut rng, NAMES)),
                t(if rng.gen_bool(0.5) { "f" } else { "m" }),
                i(rng.gen_range(2050..2150)),
                i(rng.gen_range(0..2)),
            ],
        );
        let n_adm = rng.gen_range(1..=3);
        for a in 0..n_adm {
            // The very first admission carries every event kind so the
            // deepest path of the graph is always populated.
            let first = p == 0 && a == 0;
            let at_least = usize::from(first);
            push(
                "admissions",
                vec![
                    i(hadm),
                    i(subject),
                    i(rng.gen_range(18..=90)),
                    t(pick(&mut rng, ADMISSION_TYPES)),
                    t(pick(&mut rng, INSURANCE)),
                    i(rng.gen_range(2100..=2200)),
                    i(rng.gen_range(1..=30)),
                    t(pick(&mut rng, LOCATIONS)),
                ],
            );
            let n_diag = rng.gen_range(at_least..=5);
            let first_diag = diag;
            for s in 0..n_diag {
                let (code, short, long) = *pick(&mut rng, DIAGNOSES);
                push("diagnoses", vec![i(diag), i(hadm), t(code), i(s as i64 + 1)]);
                push("d_icd_diagnoses", vec![i(diag), t(short), t(long)]);
                diag += 1;
            }
            if n_diag > 0 {
                let n_proc = rng.gen_range(at_least..=5);
                for _ in 0..n_proc {
                    let owner = rng.gen_range(first_diag..diag);
                    let (code, short, long) = *pick(&mut rng, PROCEDURES);
                    push("procedures", vec![i(proc), i(owner), t(code)]);
                    push("d_icd_procedures", vec![i(proc), t(short), t(long)]);
                    proc += 1;
                }
            }
            for _ in 0..rng.gen_range(at_least..=5) {
                push(
                    "prescriptions",
                    vec![
                        i(hadm),
                        t(pick(&mut rng, DRUGS)),
                        t(pick(&mut rng, DRUG_TYPES)),
                        CellValue::Float(rng.gen_range(1..=1000) as f64 / 10.0),
                        t(pick(&mut rng, ROUTES)),
                        i(rng.gen_range(0..=48)),
                    ],
                );
            }
            for _ in 0..rng.gen_range(at_least..=5) {
                let (itemid, label, fluid, category) = *pick(&mut rng, LAB_ITEMS);
                push(
                    "lab",
                    vec![i(lab), i(hadm), i(itemid), CellValue::Float(rng.gen_range(0..=20000) as f64 / 100.0), t(pick(&mut rng, LAB_FLAGS))],
                );
                push("d_labitems", vec![i(lab), t(label), t(fluid), t(category)]);
                lab += 1;
            }
            hadm += 1;
        }
    }
    for spec in &nine_table_manifest().tables {
        tables.entry(spec.name.clone()).or_default();
    }
    tables
}

/// Joins the normalized rows back into the merged shape.
fn flatten(nine: &BTreeMap<String, Vec<Row>>) -> BTreeMap<String, Vec<Row>> {
    let by_key = |table: &str| -> BTreeMap<CellValue, &Row> { nine[table].iter().map(|r| (r[0].clone(), r)).collect() };
    let patients = by_key("patients");
    let diagnoses = by_key("diagnoses");
    let dict = |table: &str| -> BTreeMap<CellValue, &Row> { nine[table].iter().map(|r| (r[0].clone(), r)).collect() };
    let d_diag = dict("d_icd_diagnoses");
    let d_proc = dict("d_icd_procedures");
    let d_lab = dict("d_labitems");
    let mut out: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for a in &nine["admissions"] {
        let p = patients[&a[1]];
        let mut row = vec![a[0].clone(), p[0].clone()];
        row.extend_from_slice(&p[1..]);
        row.extend_from_slice(&a[2..]);
        out.entry("demographic".into()).or_default().push(row);
    }
    for d in &nine["diagnoses"] {
        let names = d_diag[&d[0]];
        out.entry("diagnoses".into()).or_default().push(vec![
            d[1].clone(),
            d[2].clone(),
            d[3].clone(),
            names[1].clone(),
            names[2].clone(),
        ]);
    }
    for pr in &nine["procedures"] {
        let names = d_proc[&pr[0]];
        let hadm = diagnoses[&pr[1]][1].clone();
        out.entry("procedures".into()).or_default().push(vec![hadm, pr[2].clone(), names[1].clone(), names[2].clone()]);
    }
    out.insert("prescriptions".into(), nine["prescriptions"].clone());
    for l in &nine["lab"] {
        let item = d_lab[&l[0]];
        let mut row = l[1..].to_vec();
        row.extend_from_slice(&item[1..]);
        out.entry("lab".into()).or_default().push(row);
    }
    for spec in &five_table_manifest().tables {
        out.entry(spec.name.clone()).or_default();
    }
    out
}

/// Deterministic synthetic data: 1 to 3 admissions per patient and 0 to 5
/// diagnoses, procedures, prescriptions and lab events per admission, each
/// dictionary row one-to-one with its event.
pub fn gen_fixture(spec: FixtureSpec) -> Result<Fixture, String> {
    if spec.n_patients == 0 {
        return Err("a fixture needs at least one patient".into());
    }
    let nine = generate_nine(spec.n_patients, spec.seed);
    Ok(match spec.schema {
        FixtureSchema::NineTable => Fixture { manifest: nine_table_manifest(), rows: nine },
        FixtureSchema::FiveTable => Fixture { manifest: five_table_manifest(), rows: flatten(&nine) },
    })
}

impl Fixture {
    pub fn database(&self) -> Result<Database, LoadError> {
        Database::from_rows(&self.manifest, self.rows.clone())
    }

    /// Writes `manifest.json` and one `<table>.csv` per table.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> std::io::Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest.json"), self.manifest.to_json_string() + "\n")?;
        for spec in &self.manifest.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", spec.name)))?;
            w.write_record(spec.columns.iter().map(|c| c.name.as_str()))?;
            for row in self.rows.get(&spec.name).map(Vec::as_slice).unwrap_or_default() {
                w.write_record(row.iter().map(CellValue::to_plain))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

/// Built-in templates for the nine-table shape, spanning zero to five joins.
pub const NINE_TABLE_TEMPLATES: &str = r#"[
  {"nlq": "how many |g| patients are there?",
   "sql": "select count ( patients.name ) from patients where patients.gender = |g|",
   "slots": {"g": "patients.gender"}},
  {"nlq": "what is the year of birth of patients named |n|?",
   "sql": "select patients.dob from patients where patients.name = |n|",
   "slots": {"n": "patients.name"}},
  {"nlq": "what is the average age of |g| patients admitted for less than |d| days?",
   "sql": "select avg ( admissions.age ) from patients inner join admissions on patients.subject_id = admissions.subject_id where patients.gender = |g| and admissions.days_stay < |d|",
   "slots": {"g": "patients.gender", "d": "admissions.days_stay"}},
  {"nlq": "how many lab tests were done in |t| admissions?",
   "sql": "select count ( lab.value_num ) from admissions inner join lab on admissions.hadm_id = lab.hadm_id where admissions.admission_type = |t|",
   "slots": {"t": "admissions.admission_type"}},
  {"nlq": "how many prescriptions of |drug| were given?",
   "sql": "select count ( prescriptions.timestep ) from patients inner join admissions on patients.subject_id = admissions.subject_id inner join prescriptions on admissions.hadm_id = prescriptions.hadm_id where prescriptions.drug = |drug|",
   "slots": {"drug": "prescriptions.drug"}},
  {"nlq": "what is the lowest |l| value measured?",
   "sql": "select min ( lab.value_num ) from admissions inner join lab on admissions.hadm_id = lab.hadm_id inner join d_labitems on lab.lab_id = d_labitems.lab_id where d_labitems.label = |l|",
   "slots": {"l": "d_labitems.label"}},
  {"nlq": "how many diagnoses of |t| were made for |g| patients?",
   "sql": "select count ( diagnoses.seq_num ) from patients inner join admissions on patients.subject_id = admissions.subject_id inner join diagnoses on admissions.hadm_id = diagnoses.hadm_id inner join d_icd_diagnoses on diagnoses.diag_id = d_icd_diagnoses.diag_id where d_icd_diagnoses.short_title = |t| and patients.gender = |g|",
   "slots": {"t": "d_icd_diagnoses.short_title", "g": "patients.gender"}},
  {"nlq": "how many |t| procedures were done in admissions covered by |i|?",
   "sql": "select count ( procedures.proc_code ) from admissions inner join diagnoses on admissions.hadm_id = diagnoses.hadm_id inner join procedures on diagnoses.diag_id = procedures.diag_id inner join d_icd_procedures on procedures.proc_id = d_icd_procedures.proc_id where d_icd_procedures.proc_short_title = |t| and admissions.insurance = |i|",
   "slots": {"t": "d_icd_procedures.proc_short_title", "i": "admissions.insurance"}},
  {"nlq": "what is the latest year of birth among patients who had |t|?",
   "sql": "select max ( patients.dob ) from patients inner join admissions on patients.subject_id = admissions.subject_id inner join diagnoses on admissions.hadm_id = diagnoses.hadm_id inner join procedures on diagnoses.diag_id = procedures.diag_id inner join d_icd_procedures on procedures.proc_id = d_icd_procedures.proc_id where d_icd_procedures.proc_short_title = |t|",
   "slots": {"t": "d_icd_procedures.proc_short_title"}},
  {"nlq": "how many procedures were done on |g| patients diagnosed with |a|?",
   "sql": "select count ( d_icd_procedures.proc_long_title ) from patients inner join admissions on patients.subject_id = admissions.subject_id inner join diagnoses on admissions.hadm_id = diagnoses.hadm_id inner join d_icd_diagnoses on diagnoses.diag_id = d_icd_diagnoses.diag_id inner join procedures on diagnoses.diag_id = procedures.diag_id inner join d_icd_procedures on procedures.proc_id = d_icd_procedures.proc_id where d_icd_diagnoses.short_title = |a| and patients.gender = |g|",
   "slots": {"a": "d_icd_diagnoses.short_title", "g": "patients.gender"}}
]"#;

/// Built-in templates for the five-table shape.
pub const FIVE_TABLE_TEMPLATES: &str = r#"[
  {"nlq": "how many admissions were covered by |i|?",
   "sql": "select count ( demographic.name ) from demographic where demographic.insurance = |i|",
   "slots": {"i": "demographic.insurance"}},
  {"nlq": "what is the average age of |g| patients?",
   "sql": "select avg ( demographic.age ) from demographic where demographic.gender = |g|",
   "slots": {"g": "demographic.gender"}},
  {"nlq": "how many |r| prescriptions did |g| patients get?",
   "sql": "select count ( prescriptions.drug ) from demographic inner join prescriptions on demographic.hadm_id = prescriptions.hadm_id where demographic.gender = |g| and prescriptions.route = |r|",
   "slots": {"g": "demographic.gender", "r": "prescriptions.route"}},
  {"nlq": "what is the highest |l| value measured?",
   "sql": "select max ( lab.value_num ) from demographic inner join lab on demographic.hadm_id = lab.hadm_id where lab.label = |l|",
   "slots": {"l": "lab.label"}},
  {"nlq": "how many |a| admissions had a diagnosis of |t|?",
   "sql": "select count ( diagnoses.icd9_code ) from demographic inner join diagnoses on demographic.hadm_id = diagnoses.hadm_id where diagnoses.short_title = |t| and demographic.admission_type = |a|",
   "slots": {"t": "diagnoses.short_title", "a": "demographic.admission_type"}},
  {"nlq": "what is the earliest year of birth among patients who had |t|?",
   "sql": "select min ( demographic.dob ) from demographic inner join procedures on demographic.hadm_id = procedures.hadm_id where procedures.proc_short_title = |t|",
   "slots": {"t": "procedures.proc_short_title"}},
  {"nlq": "what are the names of patients who stayed more than |d| days?",
   "sql": "select demographic.name from demographic where demographic.days_stay > |d|",
   "slots": {"d": "demographic.days_stay"}},
  {"nlq": "how many prescriptions of |d| were given?",
   "sql": "select count ( prescriptions.dose_val_rx ) from prescriptions where prescriptions.drug = |d|",
   "slots": {"d": "prescriptions.drug"}}
]"#;

pub fn builtin_templates(schema: FixtureSchema) -> &'static str {
    match schema {
        FixtureSchema::NineTable => NINE_TABLE_TEMPLATES,
        FixtureSchema::FiveTable => FIVE_TABLE_TEMPLATES,
    }
}
