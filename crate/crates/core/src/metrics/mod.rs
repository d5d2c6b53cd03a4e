//! Class-level metrics: the seventeen quality-model metrics plus the
//! per-method measures that feed the Maintainability Index.

pub mod graph;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{ClassNode, MethodNode, Snapshot};

/// Metric values of one class.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MetricVector {
    pub cbo: u32,
    pub dac: u32,
    pub dit: u32,
    pub ld: f64,
    pub lcom: u32,
    pub ilcom: u32,
    pub mpc: u32,
    pub noc: u32,
    pub tcc: f64,
    pub loc: u32,
    pub nam: u32,
    pub nom: u32,
    pub rfc: u32,
    pub wmc: u32,
    pub cyc: u32,
    pub len: f64,
    pub lod: f64,
    /// Sum of Halstead volume over methods with a body.
    pub halstead_volume_total: f64,
    pub decision_points_total: u32,
    pub statements_total: u32,
    /// Methods with a body; abstract and interface methods are excluded.
    pub method_count: u32,
    pub method_lines_total: u32,
}

/// Metric names in output column order.
pub const METRIC_NAMES: [&str; 17] = [
    "cbo", "dac", "dit", "ld", "lcom", "ilcom", "mpc", "noc", "tcc", "loc", "nam", "nom", "rfc", "wmc", "cyc", "len",
    "lod",
];

impl MetricVector {
    /// Value of a metric by its lowercase name.
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "cbo" => self.cbo.into(),
            "dac" => self.dac.into(),
            "dit" => self.dit.into(),
            "ld" => self.ld,
            "lcom" => self.lcom.into(),
            "ilcom" => self.ilcom.into(),
            "mpc" => self.mpc.into(),
            "noc" => self.noc.into(),
            "tcc" => self.tcc,
            "loc" => self.loc.into(),
            "nam" => self.nam.into(),
            "nom" => self.nom.into(),
            "rfc" => self.rfc.into(),
            "wmc" => self.wmc.into(),
            "cyc" => self.cyc.into(),
            "len" => self.len,
            "lod" => self.lod,
            _ => return None,
        })
    }

    pub fn values(&self) -> [f64; 17] {
        METRIC_NAMES.map(|n| self.get(n).unwrap_or_default())
    }
}

/// Metric vectors keyed by class qualified name.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MetricMatrix {
    pub rows: BTreeMap<String, MetricVector>,
}

impl MetricMatrix {
    pub fn get(&self, class: &str) -> Option<&MetricVector> {
        self.rows.get(class)
    }
}

pub fn halstead_volume(method: &MethodNode) -> f64 {
    let length = f64::from(method.operator_occurrences + method.operand_occurrences);
    let vocabulary = method.distinct_operators + method.distinct_operands;
    if vocabulary <= 1 {
        0.0
    } else {
        length * f64::from(vocabulary).log2()
    }
}

pub fn cyclomatic_complexity(method: &MethodNode) -> u32 {
    1 + method.decision_points
}

/// Dotted names appearing in a type text, e.g. `Map<a.K,V[]>` gives `Map`, `a.K`, `V`.
pub fn type_names(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c == '_' || c == '$' || c == '.' || c.is_alphanumeric()))
        .filter(|s| !s.is_empty())
}

/// Snapshot classes named anywhere in `text`, other than `own`.
fn referenced<'a>(text: &'a str, known: &'a HashMap<&str, usize>, own: &'a str) -> impl Iterator<Item = &'a str> + 'a {
    type_names(text).filter(move |n| *n != own && known.contains_key(n))
}

/// Outgoing dependency edges of a class: inheritance, field, parameter,
/// return and call-target references to other snapshot classes.
fn dependencies<'a>(class: &'a ClassNode, known: &'a HashMap<&str, usize>) -> BTreeSet<&'a str> {
    let own = class.qualified_name.as_str();
    let mut out = BTreeSet::new();
    for parent in class.superclass_name.iter().chain(&class.implemented_interfaces) {
        out.extend(referenced(parent, known, own));
    }
    out.extend(coupled_classes(class, known));
    out
}

/// Classes coupled through field types, signatures and call targets.
fn coupled_classes<'a>(class: &'a ClassNode, known: &'a HashMap<&str, usize>) -> BTreeSet<&'a str> {
    let own = class.qualified_name.as_str();
    let mut out = BTreeSet::new();
    for field in &class.fields {
        out.extend(referenced(&field.declared_type_name, known, own));
    }
    for method in &class.methods {
        for t in method.return_type_name.iter().chain(&method.parameter_type_names) {
            out.extend(referenced(t, known, own));
        }
        for call in &method.calls {
            if let Some(target) = call.target.as_deref() {
                if target != own && known.contains_key(target) {
                    out.insert(target);
                }
            }
        }
    }
    out
}

/// Size of the dependency-graph strongly connected component of each class.
pub fn dependency_cycles(snapshot: &Snapshot) -> BTreeMap<String, u32> {
    let classes: Vec<&ClassNode> = snapshot.classes().collect();
    let known: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.qualified_name.as_str(), i))
        .collect();
    let adjacency: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| dependencies(c, &known).into_iter().map(|d| known[d]).collect())
        .collect();
    let sizes = graph::component_sizes(classes.len(), &adjacency);
    classes
        .iter()
        .zip(sizes)
        .map(|(c, s)| (c.qualified_name.clone(), s as u32))
        .collect()
}

fn inheritance_depths(snapshot: &Snapshot) -> (HashMap<&str, u32>, HashMap<&str, u32>) {
    let parents: HashMap<&str, Option<&str>> = snapshot
        .classes()
        .map(|c| (c.qualified_name.as_str(), c.superclass_name.as_deref()))
        .collect();
    let mut children: HashMap<&str, u32> = HashMap::new();
    for parent in parents.values().flatten() {
        if parents.contains_key(parent) {
            *children.entry(parent).or_default() += 1;
        }
    }
    let mut depths = HashMap::new();
    for &name in parents.keys() {
        let mut depth = 0;
        let mut current = name;
        let mut visited = BTreeSet::from([name]);
        while let Some(Some(parent)) = parents.get(current) {
            depth += 1;
            // Cyclic inheritance cannot compile; stop rather than loop.
            if !visited.insert(parent) {
                break;
            }
            current = parent;
        }
        depths.insert(name, depth);
    }
    (depths, children)
}

fn shares_field(a: &MethodNode, b: &MethodNode) -> bool {
    a.accessed_own_fields
        .intersection(&b.accessed_own_fields)
        .next()
        .is_some()
}

fn field_components(methods: &[MethodNode]) -> u32 {
    let n = methods.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if shares_field(&methods[i], &methods[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count() as u32
}

fn class_metrics(class: &ClassNode, known: &HashMap<&str, usize>, dit: u32, noc: u32, cyc: u32) -> MetricVector {
    let own = class.qualified_name.as_str();
    let methods = &class.methods;
    let nom = methods.len() as u32;

    let (mut own_accesses, mut foreign_accesses) = (0usize, 0usize);
    for m in methods {
        own_accesses += m.accessed_own_fields.len();
        foreign_accesses += m.accessed_foreign_fields.len();
    }
    let ld = if own_accesses + foreign_accesses == 0 {
        0.0
    } else {
        own_accesses as f64 / (own_accesses + foreign_accesses) as f64
    };

    let (mut sharing, mut disjoint) = (0u32, 0u32);
    for (i, a) in methods.iter().enumerate() {
        for b in &methods[i + 1..] {
            if shares_field(a, b) {
                sharing += 1;
            } else {
                disjoint += 1;
            }
        }
    }
    let pairs = sharing + disjoint;
    let tcc = if nom < 2 {
        0.0
    } else {
        f64::from(sharing) / f64::from(pairs)
    };

    let is_external = |target: &Option<String>| target.as_deref() != Some(own);
    let mpc = methods
        .iter()
        .flat_map(|m| &m.calls)
        .filter(|c| is_external(&c.target))
        .map(|c| c.count)
        .sum();
    let called: BTreeSet<(Option<&str>, &str)> = methods
        .iter()
        .flat_map(|m| &m.calls)
        .filter(|c| is_external(&c.target))
        .map(|c| (c.target.as_deref(), c.method.as_str()))
        .collect();

    let dac = class
        .fields
        .iter()
        .filter(|f| referenced(&f.declared_type_name, known, own).next().is_some())
        .count() as u32;

    let names: Vec<usize> = std::iter::once(class.simple_name())
        .chain(methods.iter().map(|m| m.name.as_str()))
        .chain(class.fields.iter().map(|f| f.name.as_str()))
        .map(|n| n.chars().count())
        .collect();
    let len = names.iter().sum::<usize>() as f64 / names.len() as f64;

    let documented = usize::from(class.doc_comment_present)
        + methods.iter().filter(|m| m.doc_comment_present).count()
        + class.fields.iter().filter(|f| f.doc_comment_present).count();
    let lod = 1.0 - documented as f64 / (1 + methods.len() + class.fields.len()) as f64;

    let bodied: Vec<&MethodNode> = methods.iter().filter(|m| m.has_body).collect();

    MetricVector {
        cbo: coupled_classes(class, known).len() as u32,
        dac,
        dit,
        ld,
        lcom: disjoint.saturating_sub(sharing),
        ilcom: field_components(methods),
        mpc,
        noc,
        tcc,
        loc: class.line_count,
        nam: (class.fields.len() + methods.len()) as u32,
        nom,
        rfc: nom + called.len() as u32,
        wmc: methods.iter().map(cyclomatic_complexity).sum(),
        cyc,
        len,
        lod,
        halstead_volume_total: bodied.iter().map(|m| halstead_volume(m)).sum(),
        decision_points_total: bodied.iter().map(|m| m.decision_points).sum(),
        statements_total: bodied.iter().map(|m| m.statements).sum(),
        method_count: bodied.len() as u32,
        method_lines_total: bodied.iter().map(|m| m.line_count).sum(),
    }
}

/// Computes every class's metric vector. Whole-graph metrics (DIT, NOC,
/// CYC) are computed first; per-class work then runs in parallel.
pub fn compute_metrics(snapshot: &Snapshot) -> MetricMatrix {
    let classes: Vec<&ClassNode> = snapshot.classes().collect();
    let known: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.qualified_name.as_str(), i))
        .collect();
    let (depths, children) = inheritance_depths(snapshot);
    let cycles = dependency_cycles(snapshot);
    let rows = classes
        .par_iter()
        .map(|c| {
            let name = c.qualified_name.as_str();
            let vector = class_metrics(
                c,
                &known,
                depths[name],
                children.get(name).copied().unwrap_or(0),
                cycles[name],
            );
            (c.qualified_name.clone(), vector)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    MetricMatrix { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CallSite, ClassKind, FieldDecl, PackageNode};
    use proptest::prelude::*;

    fn snapshot(classes: Vec<ClassNode>) -> Snapshot {
        Snapshot::new(
            "v",
            "",
            vec![PackageNode {
                qualified_name: String::new(),
                classes,
            }],
        )
        .unwrap()
    }

    fn field(name: &str, ty: &str) -> FieldDecl {
        FieldDecl {
            name: name.into(),
            declared_type_name: ty.into(),
            doc_comment_present: false,
        }
    }

    fn method(name: &str, fields: &[&str]) -> MethodNode {
        let mut m = MethodNode::new(name);
        m.accessed_own_fields = fields.iter().map(|f| f.to_string()).collect();
        m
    }

    #[test]
    fn halstead_examples() {
        assert_eq!(halstead_volume(&MethodNode::new("m")), 0.0);
        let mut m = MethodNode::new("m");
        (m.operator_occurrences, m.distinct_operators) = (2, 2);
        (m.operand_occurrences, m.distinct_operands) = (3, 3);
        let expected = 5.0 * (5f64.ln() / 2f64.ln());
        assert!((halstead_volume(&m) - expected).abs() < 1e-12);
        assert!((halstead_volume(&m) - 11.6096).abs() < 1e-4);
        m.operator_occurrences *= 2;
        m.operand_occurrences *= 2;
        assert!((halstead_volume(&m) - 2.0 * expected).abs() < 1e-12);
    }

    #[test]
    fn cyclomatic_examples() {
        let mut m = MethodNode::new("m");
        assert_eq!(cyclomatic_complexity(&m), 1);
        m.decision_points = 2;
        assert_eq!(cyclomatic_complexity(&m), 3);
        m.decision_points = 3;
        assert_eq!(cyclomatic_complexity(&m), 4);
    }

    #[test]
    fn degenerate_class() {
        let matrix = compute_metrics(&snapshot(vec![ClassNode::new("E", ClassKind::Class)]));
        let v = &matrix.rows["E"];
        assert_eq!((v.nom, v.wmc, v.lcom, v.ilcom, v.cyc), (0, 0, 0, 0, 1));
        assert_eq!((v.tcc, v.ld, v.lod), (0.0, 0.0, 1.0));
        assert_eq!(v.len, 1.0);
    }

    #[test]
    fn inheritance_pair() {
        let a = ClassNode::new("A", ClassKind::Class);
        let mut b = ClassNode::new("B", ClassKind::Class);
        b.superclass_name = Some("A".into());
        let m = compute_metrics(&snapshot(vec![a, b]));
        assert_eq!((m.rows["A"].dit, m.rows["A"].noc), (0, 1));
        assert_eq!((m.rows["B"].dit, m.rows["B"].noc), (1, 0));
        assert_eq!(m.rows["B"].cbo, 0);
        assert_eq!(m.rows["B"].cyc, 1);
    }

    #[test]
    fn external_superclass_counts_one_level() {
        let mut c = ClassNode::new("C", ClassKind::Class);
        c.superclass_name = Some("javax.swing.JPanel".into());
        assert_eq!(compute_metrics(&snapshot(vec![c])).rows["C"].dit, 1);
    }

    #[test]
    fn mutual_field_reference() {
        let mut a = ClassNode::new("A", ClassKind::Class);
        a.fields.push(field("b", "B"));
        let mut b = ClassNode::new("B", ClassKind::Class);
        b.fields.push(field("a", "A"));
        let m = compute_metrics(&snapshot(vec![a, b]));
        for name in ["A", "B"] {
            let v = &m.rows[name];
            assert_eq!((v.cbo, v.dac, v.cyc), (1, 1, 2), "{name}");
        }
    }

    #[test]
    fn triangle_cycle() {
        let mk = |name: &str, target: &str| {
            let mut c = ClassNode::new(name, ClassKind::Class);
            let mut m = MethodNode::new("go");
            m.calls.push(CallSite {
                target: Some(target.into()),
                method: "go".into(),
                count: 1,
            });
            c.methods.push(m);
            c
        };
        let cycles = dependency_cycles(&snapshot(vec![mk("A", "B"), mk("B", "C"), mk("C", "A")]));
        assert!(cycles.values().all(|&s| s == 3));
    }

    #[test]
    fn cohesion_metrics() {
        // m1,m2 share x; m3 uses y; m4 uses nothing.
        let mut c = ClassNode::new("K", ClassKind::Class);
        c.fields = vec![field("x", "int"), field("y", "int")];
        c.methods = vec![
            method("m1", &["x"]),
            method("m2", &["x", "y"]),
            method("m3", &["y"]),
            method("m4", &[]),
        ];
        let v = &compute_metrics(&snapshot(vec![c])).rows["K"];
        // pairs: 6; sharing: (m1,m2), (m2,m3) → 2; disjoint 4
        assert_eq!(v.lcom, 2);
        assert!((v.tcc - 2.0 / 6.0).abs() < 1e-12);
        assert_eq!(v.ilcom, 2);
        assert_eq!(v.ld, 1.0);
        assert_eq!(v.nam, 6);
    }

    #[test]
    fn coupling_counts_calls_and_generics() {
        let mut a = ClassNode::new("A", ClassKind::Class);
        a.fields.push(field("bs", "java.util.List<B>"));
        a.fields.push(field("n", "int"));
        let mut m = MethodNode::new("run");
        m.calls = vec![
            CallSite {
                target: Some("C".into()),
                method: "f".into(),
                count: 2,
            },
            CallSite {
                target: None,
                method: "g".into(),
                count: 1,
            },
            CallSite {
                target: Some("A".into()),
                method: "h".into(),
                count: 5,
            },
        ];
        m.accessed_foreign_fields.insert(crate::model::ForeignField {
            class: "C".into(),
            field: "z".into(),
        });
        m.accessed_own_fields.insert("n".into());
        a.methods.push(m);
        let v = &compute_metrics(&snapshot(vec![
            a,
            ClassNode::new("B", ClassKind::Class),
            ClassNode::new("C", ClassKind::Class),
        ]))
        .rows["A"];
        assert_eq!((v.cbo, v.dac, v.mpc, v.rfc), (2, 1, 3, 3));
        assert_eq!(v.ld, 0.5);
    }

    #[test]
    fn documentation_and_name_length() {
        let mut c = ClassNode::new("p.Doc", ClassKind::Class);
        c.doc_comment_present = true;
        c.fields.push(FieldDecl {
            doc_comment_present: true,
            ..field("ab", "int")
        });
        c.methods.push(method("abcdef", &[]));
        let snap = Snapshot::new(
            "v",
            "",
            vec![PackageNode {
                qualified_name: "p".into(),
                classes: vec![c],
            }],
        )
        .unwrap();
        let v = &compute_metrics(&snap).rows["p.Doc"];
        assert!((v.lod - (1.0 - 2.0 / 3.0)).abs() < 1e-12);
        assert!((v.len - 11.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn abstract_methods_excluded_from_mi_totals() {
        let mut c = ClassNode::new("A", ClassKind::Class);
        let mut m = MethodNode::new("concrete");
        m.statements = 4;
        m.decision_points = 1;
        m.line_count = 6;
        let mut a = MethodNode::new("abstractOne");
        a.has_body = false;
        c.methods = vec![m, a];
        let v = &compute_metrics(&snapshot(vec![c])).rows["A"];
        assert_eq!(
            (
                v.method_count,
                v.statements_total,
                v.decision_points_total,
                v.method_lines_total
            ),
            (1, 4, 1, 6)
        );
        assert_eq!((v.nom, v.wmc), (2, 3));
    }

    fn arb_class() -> impl Strategy<Value = ClassNode> {
        (
            proptest::collection::vec(("[a-z]{1,6}", "(int|B|String)"), 0..4),
            proptest::collection::vec(
                (
                    "[a-z]{1,6}",
                    proptest::collection::btree_set("[a-z]{1,6}", 0..3),
                    0u32..4,
                ),
                0..5,
            ),
        )
            .prop_map(|(fields, methods)| {
                let mut c = ClassNode::new("A", ClassKind::Class);
                let mut seen = BTreeSet::new();
                for (name, ty) in fields {
                    if seen.insert(name.clone()) {
                        c.fields.push(field(&name, &ty));
                    }
                }
                for (name, used, decisions) in methods {
                    let mut m = MethodNode::new(name);
                    m.accessed_own_fields = used.into_iter().filter(|u| c.has_field(u)).collect();
                    m.decision_points = decisions;
                    c.methods.push(m);
                }
                c
            })
    }

    proptest! {
        #[test]
        fn bounded_ratios_and_orderings(class in arb_class()) {
            let v = compute_metrics(&snapshot(vec![class, ClassNode::new("B", ClassKind::Class)])).rows["A"].clone();
            prop_assert!((0.0..=1.0).contains(&v.ld));
            prop_assert!((0.0..=1.0).contains(&v.tcc));
            prop_assert!((0.0..=1.0).contains(&v.lod));
            prop_assert!(v.cyc >= 1);
            prop_assert!(v.wmc >= v.nom);
            if v.nom >= 1 {
                prop_assert!(v.ilcom >= 1);
            }
        }

        #[test]
        fn inert_method_shifts_only_size_metrics(class in arb_class()) {
            let before = compute_metrics(&snapshot(vec![class.clone(), ClassNode::new("B", ClassKind::Class)])).rows["A"].clone();
            let mut grown = class;
            grown.methods.push(MethodNode::new("zzInert"));
            let after = compute_metrics(&snapshot(vec![grown, ClassNode::new("B", ClassKind::Class)])).rows["A"].clone();
            prop_assert_eq!(after.nom, before.nom + 1);
            prop_assert_eq!(after.wmc, before.wmc + 1);
            prop_assert_eq!(after.rfc, before.rfc + 1);
            prop_assert_eq!((after.cbo, after.dac, after.dit, after.noc), (before.cbo, before.dac, before.dit, before.noc));
        }

        #[test]
        fn longer_names_change_only_len(class in arb_class()) {
            let rename = |c: &ClassNode, suffix: &str| {
                let mut c = c.clone();
                for f in &mut c.fields {
                    f.name.push_str(suffix);
                }
                for m in &mut c.methods {
                    m.name.push_str(suffix);
                    m.accessed_own_fields = m.accessed_own_fields.iter().map(|f| format!("{f}{suffix}")).collect();
                }
                c
            };
            let b = || ClassNode::new("B", ClassKind::Class);
            let same = compute_metrics(&snapshot(vec![rename(&class, "Q"), b()])).rows["A"].clone();
            let longer = compute_metrics(&snapshot(vec![rename(&class, "QQQ"), b()])).rows["A"].clone();
            let base = compute_metrics(&snapshot(vec![class, b()])).rows["A"].clone();
            for name in METRIC_NAMES {
                if name != "len" {
                    prop_assert_eq!(longer.get(name), base.get(name), "{}", name);
                }
            }
            prop_assert!(longer.len >= same.len);
        }
    }
}
