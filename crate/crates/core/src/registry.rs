//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family (Laplace inverters, water-level rules, sweep
//! metrics, figure recipes) exposes a trait; implementations are boxed and
//! registered under a stable name so the CLI and config files can select
//! them at runtime.

use crate::error::{Error, Result};

/// Implemented by every strategy that can be stored in a [`Registry`].
pub trait Named {
    fn name(&self) -> &str;
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy. A later registration under an existing name replaces
    /// the earlier one.
    pub fn register(&mut self, entry: Box<T>) -> &mut Self {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == entry.name()) {
            *slot = entry;
        } else {
            self.entries.push(entry);
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown {} '{}' (available: {})",
                    self.kind,
                    name,
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
