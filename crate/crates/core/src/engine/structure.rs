use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::language::resolve::cartesian;
use crate::language::{GroundAtom, TypedStructure, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

/// A three-valued interpretation. Domains are always total; atoms and
/// constants missing from the maps are unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialStructure {
    pub name: String,
    pub vocabulary: Arc<Vocabulary>,
    pub domains: IndexMap<String, Vec<String>>,
    pub atoms: BTreeMap<GroundAtom, bool>,
    pub constants: BTreeMap<String, String>,
}

impl From<&TypedStructure> for PartialStructure {
    fn from(s: &TypedStructure) -> Self {
        PartialStructure {
            name: s.name.clone(),
            vocabulary: s.vocabulary.clone(),
            domains: s.domains.clone(),
            atoms: s.atoms.clone(),
            constants: s.constants.clone(),
        }
    }
}

impl PartialStructure {
    pub fn value(&self, atom: &GroundAtom) -> Truth {
        match self.atoms.get(atom) {
            Some(true) => Truth::True,
            Some(false) => Truth::False,
            None => Truth::Unknown,
        }
    }

    pub fn domain(&self, ty: &str) -> &[String] {
        self.domains.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every ground atom of the vocabulary, predicates in declaration order
    /// and tuples in domain order.
    pub fn all_atoms(&self) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for (name, sig) in &self.vocabulary.predicates {
            out.extend(
                self.tuples(&sig.args)
                    .into_iter()
                    .map(|t| GroundAtom::new(name.clone(), t)),
            );
        }
        out
    }

    pub(crate) fn tuples(&self, types: &[String]) -> Vec<Vec<String>> {
        let empty = Vec::new();
        let doms: Vec<&Vec<String>> = types.iter().map(|t| self.domains.get(t).unwrap_or(&empty)).collect();
        cartesian(&doms)
    }

    pub fn atom_count(&self) -> usize {
        self.vocabulary
            .predicates
            .values()
            .map(|sig| sig.args.iter().map(|t| self.domain(t).len()).product::<usize>())
            .sum()
    }

    pub fn is_total(&self) -> bool {
        self.atoms.len() == self.atom_count() && self.constants.len() == self.vocabulary.constants.len()
    }

    /// Render as a structure block that parses back to the same
    /// interpretation.
    pub fn render(&self) -> String {
        let mut out = format!("structure {} : {} {{\n", self.name, self.vocabulary.name);
        for (ty, elems) in &self.domains {
            let _ = writeln!(out, "    {ty} = {}", set_text(elems.iter().cloned()));
        }
        for (name, sig) in &self.vocabulary.predicates {
            let tuples = self.tuples(&sig.args);
            let mut ct = Vec::new();
            let mut cf = Vec::new();
            for t in tuples.iter() {
                match self.atoms.get(&GroundAtom::new(name.clone(), t.clone())) {
                    Some(true) => ct.push(t.join(",")),
                    Some(false) => cf.push(t.join(",")),
                    None => {}
                }
            }
            if sig.args.is_empty() {
                if let Some(v) = self.atoms.get(&GroundAtom::new(name.clone(), vec![])) {
                    let _ = writeln!(out, "    {name} = {v}");
                }
            } else if ct.len() + cf.len() == tuples.len() {
                let _ = writeln!(out, "    {name} = {}", set_text(ct));
            } else {
                if !ct.is_empty() {
                    let _ = writeln!(out, "    {name}<ct> = {}", set_text(ct));
                }
                if !cf.is_empty() {
                    let _ = writeln!(out, "    {name}<cf> = {}", set_text(cf));
                }
            }
        }
        for name in self.vocabulary.constants.keys() {
            if let Some(v) = self.constants.get(name) {
                let _ = writeln!(out, "    {name} = {v}");
            }
        }
        out.push('}');
        out
    }
}

fn set_text(items: impl IntoIterator<Item = String>) -> String {
    let items: Vec<String> = items.into_iter().collect();
    if items.is_empty() {
        "{}".to_string()
    } else {
        format!("{{ {} }}", items.join("; "))
    }
}
