//! Seeded generators for synthetic N-Triples corpora.
//!
//! These mimic the shape of common benchmark data (a university ontology, a
//! clinical event store, an encyclopedic knowledge base) at desk scale, plus
//! corpora with planted entity types for checking the clustering end to end.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::RDF_TYPE;

const UB: &str = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
const SDB: &str = "http://semanticdb.ccf.org/";
const DBO: &str = "http://dbpedia.org/ontology/";
const DBR: &str = "http://dbpedia.org/resource/";

struct Writer {
    out: String,
}

impl Writer {
    fn new() -> Self {
        Self { out: String::new() }
    }

    fn iri(&mut self, s: &str, p: &str, o: &str) {
        let _ = writeln!(self.out, "<{s}> <{p}> <{o}> .");
    }

    fn lit(&mut self, s: &str, p: &str, o: &str) {
        let escaped = o.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(self.out, "<{s}> <{p}> \"{escaped}\" .");
    }

    fn typed(&mut self, s: &str, p: &str, o: &str, dt: &str) {
        let _ = writeln!(self.out, "<{s}> <{p}> \"{o}\"^^<{dt}> .");
    }
}

/// University data: students, professors, courses and departments.
///
/// `name` and `rdf:type` are used by every subject; `takesCourse` only by
/// students.
pub fn lubm_like(students: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer::new();
    let departments = (students / 40).clamp(2, 6);
    let courses = (students / 4).max(4);
    let professors = (students / 8).max(2);
    let dept = |d: usize| format!("http://www.Department{d}.University0.edu");
    let course = |c: usize| format!("http://www.University0.edu/Course{c}");

    for d in 0..departments {
        let s = dept(d);
        w.lit(&s, &format!("{UB}name"), &format!("Department{d}"));
        w.iri(&s, &format!("{UB}subOrganizationOf"), "http://www.University0.edu");
        w.iri(&s, RDF_TYPE, &format!("{UB}Department"));
    }
    for c in 0..courses {
        let s = course(c);
        w.lit(&s, &format!("{UB}name"), &format!("Course{c}"));
        w.iri(&s, RDF_TYPE, &format!("{UB}Course"));
    }
    for p in 0..professors {
        let s = format!("http://www.University0.edu/FullProfessor{p}");
        let d = p % departments;
        w.lit(&s, &format!("{UB}telephone"), "xxx-xxx-xxxx");
        w.iri(&s, &format!("{UB}worksFor"), &dept(d));
        for _ in 0..2 {
            w.iri(&s, &format!("{UB}teacherOf"), &course(rng.gen_range(0..courses)));
        }
        w.lit(&s, &format!("{UB}name"), &format!("FullProfessor{p}"));
        w.lit(
            &s,
            &format!("{UB}emailAddress"),
            &format!("FullProfessor{p}@Department{d}.University0.edu"),
        );
        w.iri(&s, RDF_TYPE, &format!("{UB}FullProfessor"));
    }
    for i in 0..students {
        let s = format!("http://www.University0.edu/Student{i}");
        let d = rng.gen_range(0..departments);
        w.lit(&s, &format!("{UB}telephone"), "xxx-xxx-xxxx");
        w.iri(&s, &format!("{UB}memberOf"), &dept(d));
        for _ in 0..rng.gen_range(1..=3) {
            w.iri(&s, &format!("{UB}takesCourse"), &course(rng.gen_range(0..courses)));
        }
        w.lit(&s, &format!("{UB}name"), &format!("UndergraduateStudent{i}"));
        w.lit(
            &s,
            &format!("{UB}emailAddress"),
            &format!("Student{i}@Department{d}.University0.edu"),
        );
        w.iri(&s, RDF_TYPE, &format!("{UB}UndergraduateStudent"));
    }
    w.out
}

/// Clinical records: surgery procedures, surgery events and encounter
/// events linked to patients.
pub fn semanticdb_like(patients: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer::new();
    let valves = ["pulmonary", "mitral", "aortic", "tricuspid"];
    let actions = ["valve repair", "valve replacement"];
    let encounters = ["outpatient visit", "follow up visit", "emergency admission"];
    let xsd_date = "http://www.w3.org/2001/XMLSchema#date";
    let mut proc_id = 100;
    let mut event_id = 1;
    for p in 0..patients {
        let patient = format!("{SDB}Patient:{p}");
        w.lit(&patient, &format!("{SDB}hasGender"), if p % 2 == 0 { "female" } else { "male" });
        w.typed(&patient, &format!("{SDB}hasBirthYear"), &format!("{}", 1930 + rng.gen_range(0..60)), "http://www.w3.org/2001/XMLSchema#gYear");
        w.iri(&patient, RDF_TYPE, &format!("{SDB}Patient"));

        let surgery = format!("{SDB}Event:{event_id}");
        event_id += 1;
        w.iri(&surgery, &format!("{SDB}hasPatient"), &patient);
        w.typed(&surgery, &format!("{SDB}hasDate"), &format!("2010-0{}-1{}", rng.gen_range(1..10), rng.gen_range(0..10)), xsd_date);
        w.lit(&surgery, &format!("{SDB}eventType"), "surgery");
        w.iri(&surgery, RDF_TYPE, &format!("{SDB}SurgeryEvent"));
        for _ in 0..rng.gen_range(1..=2) {
            let procedure = format!("{SDB}SurgeryProcedure:{proc_id}");
            proc_id += 1;
            let desc = format!(
                "{} {}",
                valves.choose(&mut rng).unwrap(),
                actions.choose(&mut rng).unwrap()
            );
            w.lit(&procedure, &format!("{SDB}SurgeryProcedureDescription"), &desc);
            w.lit(&procedure, &format!("{SDB}SurgeryProcedureClass"), "cardiac valve");
            w.iri(&procedure, &format!("{SDB}belongsToEvent"), &surgery);
            w.iri(&procedure, RDF_TYPE, &format!("{SDB}SurgeryProcedure"));
        }
        for _ in 0..rng.gen_range(1..=2) {
            let encounter = format!("{SDB}Event:{event_id}");
            event_id += 1;
            w.iri(&encounter, &format!("{SDB}hasPatient"), &patient);
            w.typed(&encounter, &format!("{SDB}hasDate"), &format!("2011-0{}-2{}", rng.gen_range(1..10), rng.gen_range(0..10)), xsd_date);
            w.lit(&encounter, &format!("{SDB}encounterReason"), encounters.choose(&mut rng).unwrap());
            w.iri(&encounter, RDF_TYPE, &format!("{SDB}EncounterEvent"));
        }
    }
    w.out
}

/// Encyclopedic entities: people, cities and films with irregular
/// descriptions and multilingual labels.
pub fn dbpedia_like(entities: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer::new();
    let rdfs_label = "http://www.w3.org/2000/01/rdf-schema#label";
    let cities = (entities / 6).max(3);
    let people = entities / 2;
    let films = entities - people - cities;
    let city = |c: usize| format!("{DBR}City_{c}");
    let person = |p: usize| format!("{DBR}Person_{p}");
    let first = ["John", "Maria", "Ahmet", "Li", "Sofia", "Omar", "Anna"];
    let genres = ["drama", "comedy", "documentary", "thriller"];

    for c in 0..cities {
        let s = city(c);
        let _ = writeln!(w.out, "<{s}> <{rdfs_label}> \"City {c}\"@en .");
        w.typed(&s, &format!("{DBO}populationTotal"), &format!("{}", rng.gen_range(10_000..5_000_000)), "http://www.w3.org/2001/XMLSchema#integer");
        w.iri(&s, &format!("{DBO}country"), &format!("{DBR}Country_{}", c % 3));
        w.iri(&s, RDF_TYPE, &format!("{DBO}City"));
    }
    for p in 0..people {
        let s = person(p);
        let name = format!("{} {}", first.choose(&mut rng).unwrap(), p);
        let _ = writeln!(w.out, "<{s}> <{rdfs_label}> \"{name}\"@en .");
        w.iri(&s, &format!("{DBO}birthPlace"), &city(rng.gen_range(0..cities)));
        w.typed(&s, &format!("{DBO}birthDate"), &format!("19{}-0{}-1{}", rng.gen_range(10..99), rng.gen_range(1..10), rng.gen_range(0..10)), "http://www.w3.org/2001/XMLSchema#date");
        if rng.gen_bool(0.5) {
            w.lit(&s, &format!("{DBO}occupation"), "actor");
        }
        w.iri(&s, RDF_TYPE, &format!("{DBO}Person"));
    }
    for f in 0..films {
        let s = format!("{DBR}Film_{f}");
        let _ = writeln!(w.out, "<{s}> <{rdfs_label}> \"Film {f}\"@en .");
        w.iri(&s, &format!("{DBO}director"), &person(rng.gen_range(0..people)));
        for _ in 0..rng.gen_range(1..=2) {
            w.iri(&s, &format!("{DBO}starring"), &person(rng.gen_range(0..people)));
        }
        w.lit(&s, &format!("{DBO}genre"), genres.choose(&mut rng).unwrap());
        w.iri(&s, RDF_TYPE, &format!("{DBO}Film"));
    }
    w.out
}

/// Entities of `types` planted types with disjoint predicate vocabularies.
///
/// Members of one type use (almost) the same predicates with near-identical
/// objects; members of different types share only a generic `label`.
/// Every entity carries an `rdf:type` triple naming its planted type.
pub fn planted_types(types: usize, per_type: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer::new();
    let ns = "http://example.org/planted/";
    let kinds = ["Person", "Place", "Product", "Organization", "Event"];
    for t in 0..types {
        let kind = kinds[t % kinds.len()];
        let props: Vec<String> = (0..5).map(|k| format!("{ns}{}Prop{k}", kind.to_lowercase())).collect();
        let hub = format!("{ns}{kind}Registry");
        for i in 0..per_type {
            let s = format!("{ns}{kind}{i}");
            w.lit(&s, &format!("{ns}label"), &format!("{kind} number {i}"));
            for (k, p) in props.iter().enumerate() {
                // The last property is occasionally missing.
                if k == 4 && rng.gen_bool(0.2) {
                    continue;
                }
                if k % 2 == 0 {
                    w.iri(&s, p, &hub);
                } else {
                    w.lit(&s, p, &format!("{} value", kind.to_lowercase()));
                }
            }
            w.iri(&s, RDF_TYPE, &format!("{ns}{kind}"));
        }
    }
    w.out
}

/// A sparse corpus: each subject uses a few predicates from a pool sized so
/// that every predicate is shared by about `log2 n` subjects, plus one
/// `rdf:type` used by everybody.
pub fn sparse(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Writer::new();
    let ns = "http://example.org/sparse/";
    let per_subject = 3;
    let share = (n as f64).log2().ceil().max(1.0) as usize;
    let pool = (n * per_subject / share).max(1);
    for i in 0..n {
        let s = format!("{ns}node{i}");
        let mut picks: Vec<usize> = (0..per_subject).map(|_| rng.gen_range(0..pool)).collect();
        picks.sort_unstable();
        picks.dedup();
        for p in picks {
            w.iri(&s, &format!("{ns}p{p}"), &format!("{ns}value{}", rng.gen_range(0..n)));
        }
        w.iri(&s, RDF_TYPE, &format!("{ns}Thing"));
    }
    w.out
}
