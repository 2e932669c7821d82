//! Generic JSON document store: one file per entity type, loaded at open,
//! multi-reader, writes serialized and flushed through an atomic rename.

use std::io;
use std::path::PathBuf;
use std::sync::RwLock;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::fsutil;

pub struct DocumentStore<T> {
    path: Option<PathBuf>,
    state: RwLock<T>,
}

impl<T: Serialize + DeserializeOwned + Default> DocumentStore<T> {
    pub fn in_memory() -> Self {
        Self { path: None, state: RwLock::new(T::default()) }
    }

    pub fn open(path: PathBuf) -> io::Result<Self> {
        let state = fsutil::read_json_if_exists(&path)?.unwrap_or_default();
        Ok(Self { path: Some(path), state: RwLock::new(state) })
    }

    pub fn read<R>(&self, f: impl FnOnce(&T) -> R) -> R {
        f(&self.state.read().expect("store lock"))
    }

    /// Apply a mutation and persist the whole document before releasing the
    /// write lock.
    pub fn write<R>(&self, f: impl FnOnce(&mut T) -> R) -> io::Result<R> {
        let mut state = self.state.write().expect("store lock");
        let result = f(&mut state);
        if let Some(path) = &self.path {
            fsutil::atomic_write_json(path, &*state)?;
        }
        Ok(result)
    }
}
