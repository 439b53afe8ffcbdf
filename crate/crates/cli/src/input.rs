//! Reading inputs. Triangulation arguments also accept `gallery:<name>`,
//! and `-` reads standard input.

use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use balflip_core::explorer::{gallery, GALLERY};
use balflip_core::io::{parse_bip, parse_emb, parse_script, parse_site, parse_tri};
use balflip_core::{BipGraph, BipOp, Coloring, EvenEmbedding, FlipKind, FlipSite, Triangulation};

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_tri(arg: &str) -> Result<(Triangulation, Option<Coloring>)> {
    if let Some(name) = arg.strip_prefix("gallery:") {
        let (t, c) = gallery(name).ok_or_else(|| {
            anyhow!("unknown gallery entry `{name}` (try one of: {})", GALLERY.join(", "))
        })?;
        return Ok((t, Some(c)));
    }
    let f = parse_tri(&read_text(Path::new(arg))?).with_context(|| format!("in {arg}"))?;
    Ok((f.triangulation, f.coloring))
}

pub fn read_emb(path: &Path) -> Result<EvenEmbedding> {
    parse_emb(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn read_bip(path: &Path) -> Result<BipGraph> {
    parse_bip(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn read_script(path: &Path) -> Result<Vec<BipOp>> {
    parse_script(&read_text(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn resolve_site(s: &str) -> Result<FlipSite> {
    Ok(parse_site(s)?)
}

/// `all`, or a comma-separated list of kinds.
pub fn parse_moves(list: &str) -> Result<Vec<FlipKind>> {
    if list.trim() == "all" {
        return Ok(FlipKind::ALL.to_vec());
    }
    let kinds = list
        .split(',')
        .map(|k| k.trim().parse::<FlipKind>().map_err(|e| anyhow!("--moves: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        bail!("--moves is empty");
    }
    Ok(kinds)
}
