use indexmap::IndexMap;

use crate::json::JsonValue;
use crate::spec::ApiSpec;

/// Resources created during a run, grouped by schema in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectPool {
    entries: IndexMap<String, Vec<JsonValue>>,
}

impl ObjectPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, schema: &str, object: JsonValue) {
        self.entries.entry(schema.to_string()).or_default().push(object);
    }

    pub fn objects(&self, schema: &str) -> &[JsonValue] {
        self.entries.get(schema).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Oldest object of `schema`.
    pub fn recycle(&self, schema: &str) -> Option<&JsonValue> {
        self.objects(schema).first()
    }

    /// Oldest object of the schema identified by `id_name`.
    pub fn find_by_id(&self, spec: &ApiSpec, id_name: &str) -> Option<&JsonValue> {
        spec.schema_with_id(id_name).and_then(|s| self.recycle(&s.name))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &JsonValue)> {
        self.entries.iter().flat_map(|(k, v)| v.iter().map(move |o| (k.as_str(), o)))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recycles_oldest_of_matching_schema() {
        let mut pool = ObjectPool::new();
        assert!(pool.recycle("Player").is_none());
        pool.add("Tournament", JsonValue::Int(1));
        assert!(pool.recycle("Player").is_none());
        pool.add("Player", JsonValue::Str("p1".into()));
        pool.add("Player", JsonValue::Str("p2".into()));
        assert_eq!(pool.recycle("Player"), Some(&JsonValue::Str("p1".into())));
        assert_eq!(pool.len(), 3);
    }
}
