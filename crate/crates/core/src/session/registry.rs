use std::collections::HashMap;
use std::sync::Mutex;

use rand::RngCore;

use super::run::RunControl;

/// Active runs by id. Ids are 128 random bits in hex.
#[derive(Default)]
pub struct SessionRegistry {
    runs: Mutex<HashMap<String, RunControl>>,
}

impl SessionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, control: RunControl) -> String {
        let mut runs = self.runs.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let mut bytes = [0u8; 16];
            rand::rng().fill_bytes(&mut bytes);
            let id: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
            if !runs.contains_key(&id) {
                runs.insert(id.clone(), control);
                return id;
            }
        }
    }

    pub fn get(&self, id: &str) -> Option<RunControl> {
        self.runs.lock().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    /// Kill a run. Returns false for unknown ids.
    pub fn kill(&self, id: &str) -> bool {
        match self.get(id) {
            Some(c) => {
                c.kill();
                true
            }
            None => false,
        }
    }

    pub fn remove(&self, id: &str) -> Option<RunControl> {
        self.runs.lock().unwrap_or_else(|e| e.into_inner()).remove(id)
    }

    /// Number of unfinished runs; finished ones are dropped along the way.
    pub fn active_count(&self) -> usize {
        let mut runs = self.runs.lock().unwrap_or_else(|e| e.into_inner());
        runs.retain(|_, c| !c.is_finished());
        runs.len()
    }
}
