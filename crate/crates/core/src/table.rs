//! Bundled CSV tables compiled into the crate.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub(crate) const RESNET50_LAYERS: &str = include_str!("../data/resnet50.layers.csv");
pub(crate) const RESNET101_LAYERS: &str = include_str!("../data/resnet101.layers.csv");
pub(crate) const VGG16_LAYERS: &str = include_str!("../data/vgg16.layers.csv");
pub(crate) const PROFILES: &str = include_str!("../data/profiles.csv");

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LayerRow<'a> {
    pub layer: u32,
    pub name: &'a str,
    pub params: u64,
    pub bytes: u64,
    pub macs: u64,
}

/// Data rows of a bundled table: comments (`#`) and the header line are
/// skipped, each remaining line is split on commas and checked for width.
fn rows<'a>(
    text: &'a str,
    width: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(move |(line, l)| {
            let cols: Vec<&str> = l.split(',').map(str::trim).collect();
            if cols.len() != width {
                return Err(Error::Table {
                    line,
                    reason: format!("expected {width} columns, found {}", cols.len()),
                });
            }
            Ok((line, cols))
        })
}

fn num<T: core::str::FromStr>(line: usize, col: &str, what: &str) -> Result<T> {
    col.parse().map_err(|_| Error::Table {
        line,
        reason: format!("bad {what} `{col}`"),
    })
}

pub(crate) fn layer_rows(text: &str) -> Result<Vec<LayerRow<'_>>> {
    rows(text, 5)
        .map(|r| {
            let (line, c) = r?;
            Ok(LayerRow {
                layer: num(line, c[0], "layer")?,
                name: c[1],
                params: num(line, c[2], "params")?,
                bytes: num(line, c[3], "bytes")?,
                macs: num(line, c[4], "macs")?,
            })
        })
        .collect()
}

pub(crate) struct ProfileRow<'a> {
    pub model: &'a str,
    pub batch_size: u32,
    pub t_batch: f64,
    pub t_back: f64,
}

pub(crate) fn profile_rows(text: &str) -> Result<Vec<ProfileRow<'_>>> {
    rows(text, 4)
        .map(|r| {
            let (line, c) = r?;
            Ok(ProfileRow {
                model: c[0],
                batch_size: num(line, c[1], "batch_size")?,
                t_batch: num(line, c[2], "t_batch_s")?,
                t_back: num(line, c[3], "t_back_s")?,
            })
        })
        .collect()
}
