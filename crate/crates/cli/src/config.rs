//! Plain `key = value` configs split into `[kind name]` blocks.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub kind: String,
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Block {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry, ConfigError> {
        match self.entry(key) {
            Some(e) => Ok(e),
            None => err(self.line, format!("[{}] needs `{key}`", self.kind)),
        }
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e.parse().map(Some),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.entry(key).map(|e| e.list()).transpose()
    }
}

impl Entry {
    pub fn parse<T: FromStr>(&self) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.value.trim().parse().or_else(|e| err(self.line, format!("`{}`: {e}", self.key)))
    }

    pub fn list<T: FromStr>(&self) -> Result<Vec<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.value
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().or_else(|e| err(self.line, format!("`{}` item `{s}`: {e}", self.key))))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub blocks: Vec<Block>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut blocks: Vec<Block> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            }
            .trim();
            if body.is_empty() {
                continue;
            }
            if let Some(head) = body.strip_prefix('[') {
                let Some(head) = head.strip_suffix(']') else {
                    return err(line, "unterminated block header");
                };
                let mut words = head.split_whitespace();
                let Some(kind) = words.next() else {
                    return err(line, "empty block header");
                };
                let name = words.next().map(str::to_string);
                if words.next().is_some() {
                    return err(line, "block header takes a kind and at most one name");
                }
                blocks.push(Block { kind: kind.to_string(), name, line, entries: Vec::new() });
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return err(line, format!("expected `key = value`, found `{body}`"));
            };
            let key = key.trim();
            if key.is_empty() {
                return err(line, "empty key");
            }
            let Some(block) = blocks.last_mut() else {
                return err(line, "entry before the first block header");
            };
            block.entries.push(Entry { key: key.to_string(), value: value.trim().to_string(), line });
        }
        Ok(Config { blocks })
    }

    pub fn blocks<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Block> + 'a {
        self.blocks.iter().filter(move |b| b.kind == kind)
    }

    pub fn block(&self, kind: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.kind == kind)
    }

    pub fn require(&self, kind: &str) -> Result<&Block, ConfigError> {
        self.block(kind).ok_or(ConfigError { line: 0, message: format!("missing [{kind}] block") })
    }
}
