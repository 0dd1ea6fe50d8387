use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, GroupElement, Result};

/// Labelled generators of one group. Identity elements are dropped on
/// construction, so a set may be empty (the trivial group) while still
/// knowing its ambient identity.
#[derive(Clone, Debug)]
pub struct GeneratorSet<E> {
    identity: E,
    elements: Vec<E>,
    labels: Vec<String>,
}

impl<E: GroupElement> GeneratorSet<E> {
    pub fn new(elements: Vec<E>, labels: Vec<String>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyGenerators)?;
        if elements.iter().any(|e| !e.compatible(first)) {
            return Err(Error::IncompatibleGenerators);
        }
        let identity = first.identity_like();
        let mut labels = labels.into_iter();
        let (elements, labels) = elements
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, labels.next().unwrap_or_else(|| alloc::format!("g{}", i + 1))))
            .filter(|(e, _)| !e.is_identity())
            .unzip();
        Ok(Self { identity, elements, labels })
    }

    /// Generators labelled `g1, g2, ...`.
    pub fn unlabelled(elements: Vec<E>) -> Result<Self> {
        Self::new(elements, Vec::new())
    }

    pub fn with_labels(elements: Vec<E>, labels: &[&str]) -> Result<Self> {
        Self::new(elements, labels.iter().map(|s| s.to_string()).collect())
    }

    /// Generating set of the trivial group containing `identity`.
    pub fn trivial(identity: E) -> Self {
        Self { identity: identity.identity_like(), elements: Vec::new(), labels: Vec::new() }
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Appends a generator (ignored when it is the identity).
    pub fn push(&mut self, e: E, label: impl Into<String>) -> Result<()> {
        if !e.compatible(&self.identity) {
            return Err(Error::IncompatibleGenerators);
        }
        if !e.is_identity() {
            self.elements.push(e);
            self.labels.push(label.into());
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &str)> {
        self.elements.iter().zip(self.labels.iter().map(|s| s.as_str()))
    }
}
