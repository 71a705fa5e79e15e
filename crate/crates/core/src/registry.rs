//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family (membership oracles, Hall checkers, decomposers,
//! series tail strategies) is a trait; concrete strategies are boxed trait
//! objects registered under a stable name and selected at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Implemented by every strategy trait object so it can be registered.
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    entries: BTreeMap<&'static str, Box<T>>,
    default: Option<&'static str>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
            default: None,
        }
    }

    /// Registers a strategy under its own name, replacing any previous one.
    pub fn register(&mut self, strategy: Box<T>) -> &mut Self {
        let name = strategy.name();
        self.entries.insert(name, strategy);
        self
    }

    pub fn with(mut self, strategy: Box<T>) -> Self {
        self.register(strategy);
        self
    }

    pub fn with_default(mut self, name: &'static str) -> Self {
        debug_assert!(self.entries.contains_key(name));
        self.default = Some(name);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                name: name.to_string(),
                available: self.names(),
            })
    }

    pub fn default_strategy(&self) -> Option<&T> {
        self.default
            .and_then(|n| self.entries.get(n))
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|b| b.as_ref())
    }
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Self::new()
    }
}
