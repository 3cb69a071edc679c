//! Branch and bound over coefficient boxes.
//!
//! Box corners live on an integer grid at scale `2^S`, chosen so that every
//! midpoint down to the requested depth is integral. A box at depth `k` has
//! volume `V / 2^k` where `V` is its region's volume, so each region is
//! summarized by per-depth counts and the final volumes are exact.
//!
//! The work is first expanded breadth first into a frontier, then every
//! frontier box is finished depth first on the rayon pool. The per-box
//! tallies are integer counts, so the totals do not depend on scheduling.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{classify_grid, BoxVerdict, DyadicBox};
use crate::error::{Error, Result};
use crate::exactmath::{Dyadic, DyadicInterval, Rational};
use crate::parallel::with_workers;

/// Upper bound on boxes held in the explicit work queue.
pub const DEFAULT_MAX_PENDING: usize = 1 << 22;

/// The breadth-first phase stops once this many boxes are pending.
const FRONTIER_TARGET: usize = 2048;

/// Frontier boxes finished between two checkpoint writes.
const BATCH: usize = 128;

const HEADER: &str = "locsol-ckpt v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    /// Bisect the full cube `[-1, 1]^5`.
    Plain5D,
    /// Pin the coefficient of largest absolute value to `+-1` and bisect the
    /// remaining four; homogeneity turns face volumes into cube volumes with
    /// the factor `1/5`.
    Scaled4D,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Plain5D => "plain5d",
            Method::Scaled4D => "scaled4d",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "plain5d" => Ok(Method::Plain5D),
            "scaled4d" => Ok(Method::Scaled4D),
            other => Err(format!("unknown method `{other}` (expected plain5d or scaled4d)")),
        }
    }
}

/// A region that is bisected on its own.
struct Region {
    name: &'static str,
    /// How many of the ten faces (or the one cube) it stands for.
    weight: u32,
    fixed: Option<(usize, i8)>,
    /// Only `b >= 0` is bisected; `x -> -x` maps the face onto itself and
    /// carries `b` to `-b`, so the other half has the same volumes.
    half: bool,
}

fn regions_of(method: Method) -> &'static [Region] {
    const CUBE: [Region; 1] = [Region { name: "cube", weight: 1, fixed: None, half: false }];
    // a=+1 and e=+1 have no negative definite members; a=-1 stands for
    // e=-1 by reversal, b=+1 for b=-1, d=+1, d=-1 by reversal and x -> -x.
    // The weight counts the copies of the region among the ten faces.
    const FACES: [Region; 4] = [
        Region { name: "a=-1", weight: 4, fixed: Some((0, -1)), half: true },
        Region { name: "b=+1", weight: 4, fixed: Some((1, 1)), half: false },
        Region { name: "c=+1", weight: 2, fixed: Some((2, 1)), half: true },
        Region { name: "c=-1", weight: 2, fixed: Some((2, -1)), half: true },
    ];
    match method {
        Method::Plain5D => &CUBE,
        Method::Scaled4D => &FACES,
    }
}

/// Face volume of `a=+1` and `e=+1`, which have no negative definite members.
const TRIVIAL_VOLUME: i64 = 2 * 16;

fn free_dims(method: Method) -> u32 {
    match method {
        Method::Plain5D => 5,
        Method::Scaled4D => 4,
    }
}

/// log2 of a region's volume: 32 for the cube, 16 for a face, 8 for half a face.
fn log2_volume(method: Method, r: &Region) -> i64 {
    free_dims(method) as i64 - r.half as i64
}


/// Grid scale: each coordinate is halved at most `ceil(depth / dims)` times.
fn grid_scale(method: Method, depth: u32) -> u32 {
    depth.div_ceil(free_dims(method)) + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GridBox {
    region: usize,
    depth: u32,
    l: [i64; 5],
    u: [i64; 5],
}

impl GridBox {
    fn root(region: &Region, index: usize, scale: u32) -> GridBox {
        let one = 1i64 << scale;
        let mut l = [-one; 5];
        let mut u = [one; 5];
        if let Some((k, s)) = region.fixed {
            l[k] = s as i64 * one;
            u[k] = s as i64 * one;
        }
        if region.half {
            l[1] = 0;
        }
        GridBox { region: index, depth: 0, l, u }
    }

    /// Halves the longest free edge (lowest index on ties).
    fn split(&self, fixed: Option<(usize, i8)>) -> (GridBox, GridBox) {
        let mut best = usize::MAX;
        let mut width = 0;
        for i in 0..5 {
            if fixed.is_some_and(|(k, _)| k == i) {
                continue;
            }
            let w = self.u[i] - self.l[i];
            if w > width {
                width = w;
                best = i;
            }
        }
        assert!(width % 2 == 0 && width > 0, "grid too coarse for this depth");
        let mid = self.l[best] + width / 2;
        let mut lo = self.clone();
        let mut hi = self.clone();
        lo.u[best] = mid;
        hi.l[best] = mid;
        lo.depth += 1;
        hi.depth += 1;
        (lo, hi)
    }

    fn to_dyadic(&self, scale: u32) -> ([Dyadic; 5], [Dyadic; 5]) {
        let d = |v: i64| Dyadic::from_ratio_pow2(v, scale as i64);
        (self.l.map(d), self.u.map(d))
    }
}

/// Counts of boxes by depth for one region.
#[derive(Clone, Debug, Default)]
struct Tally {
    all: Vec<u64>,
    none: Vec<u64>,
    undecided: u64,
    boxes: u64,
}

impl Tally {
    fn new(depth: u32) -> Self {
        let n = depth as usize + 1;
        Tally { all: vec![0; n], none: vec![0; n], undecided: 0, boxes: 0 }
    }

    fn merge(&mut self, o: &Tally) {
        for (a, b) in self.all.iter_mut().zip(&o.all) {
            *a += b;
        }
        for (a, b) in self.none.iter_mut().zip(&o.none) {
            *a += b;
        }
        self.undecided += o.undecided;
        self.boxes += o.boxes;
    }
}

/// `sum counts[k] * 2^(lv - k)` as a dyadic.
fn volume_of(counts: &[u64], lv: i64) -> Dyadic {
    let top = counts.len() as i64 - 1;
    let mut sum = BigInt::zero();
    for (k, &c) in counts.iter().enumerate() {
        sum += BigInt::from(c) << (top - k as i64) as usize;
    }
    Dyadic::new(sum, lv - top)
}

/// Classifies one box and either records it or returns its children.
fn step(b: &GridBox, max_depth: u32, fixed: Option<(usize, i8)>, tally: &mut Tally) -> Option<(GridBox, GridBox)> {
    tally.boxes += 1;
    match classify_grid(&b.l, &b.u) {
        BoxVerdict::AllNegDef => tally.all[b.depth as usize] += 1,
        BoxVerdict::NoneNegDef => tally.none[b.depth as usize] += 1,
        BoxVerdict::Undecided if b.depth >= max_depth => tally.undecided += 1,
        BoxVerdict::Undecided => return Some(b.split(fixed)),
    }
    None
}

fn finish(b: GridBox, max_depth: u32, fixed: Option<(usize, i8)>) -> Tally {
    let mut tally = Tally::new(max_depth);
    let mut stack = vec![b];
    while let Some(b) = stack.pop() {
        if let Some((lo, hi)) = step(&b, max_depth, fixed, &mut tally) {
            stack.push(hi);
            stack.push(lo);
        }
    }
    tally
}

/// Exact per-region volumes, in face (or cube) units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionReport {
    pub name: String,
    pub weight: u32,
    pub volume: Dyadic,
    pub v1: Dyadic,
    pub v2: Dyadic,
    pub undecided: Dyadic,
    pub boxes: u64,
}

impl RegionReport {
    fn empty(r: &Region, method: Method) -> Self {
        RegionReport {
            name: r.name.to_string(),
            weight: r.weight,
            volume: Dyadic::from_int(1 << log2_volume(method, r)),
            v1: Dyadic::zero(),
            v2: Dyadic::zero(),
            undecided: Dyadic::zero(),
            boxes: 0,
        }
    }

    fn absorb(&mut self, t: &Tally, lv: i64, max_depth: u32) {
        self.v1 = &self.v1 + &volume_of(&t.all, lv);
        self.v2 = &self.v2 + &volume_of(&t.none, lv);
        self.undecided = &self.undecided + &Dyadic::new(BigInt::from(t.undecided), lv - max_depth as i64);
        self.boxes += t.boxes;
    }
}

/// Volumes in units of the cube `[-1, 1]^5` (total 32).
///
/// For [`Method::Plain5D`] these are dyadic; the scaled method divides by 5
/// so they are kept as rationals. Per-region dyadics are in `regions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub method: Method,
    pub depth: u32,
    /// Volume proven negative definite.
    pub v1: Rational,
    /// Volume proven free of negative definite quartics.
    pub v2: Rational,
    pub undecided: Rational,
    pub rho_inf_lower: Rational,
    pub rho_inf_upper: Rational,
    pub boxes_processed: u64,
    pub regions: Vec<RegionReport>,
}

impl BoundsReport {
    fn assemble(method: Method, depth: u32, regions: Vec<RegionReport>) -> Self {
        let (v1, v2, undecided) = match method {
            Method::Plain5D => {
                let r = &regions[0];
                (r.v1.to_rational(), r.v2.to_rational(), r.undecided.to_rational())
            }
            Method::Scaled4D => {
                let w = |f: &dyn Fn(&RegionReport) -> &Dyadic| {
                    regions
                        .iter()
                        .map(|r| f(r).to_rational() * Rational::from_integer(r.weight.into()))
                        .fold(Rational::zero(), |a, b| a + b)
                };
                let fifth = Rational::new(BigInt::one(), BigInt::from(5));
                let trivial = Rational::from_integer(BigInt::from(TRIVIAL_VOLUME));
                (w(&|r| &r.v1) * &fifth, (w(&|r| &r.v2) + trivial) * &fifth, w(&|r| &r.undecided) * &fifth)
            }
        };
        let total = Rational::from_integer(BigInt::from(32));
        BoundsReport {
            method,
            depth,
            rho_inf_lower: &v2 / &total,
            rho_inf_upper: Rational::one() - &v1 / &total,
            v1,
            v2,
            undecided,
            boxes_processed: regions.iter().map(|r| r.boxes).sum(),
            regions,
        }
    }

    pub fn width(&self) -> Rational {
        &self.rho_inf_upper - &self.rho_inf_lower
    }

    /// Outward-rounded enclosure of `rho(inf)`.
    pub fn interval(&self, precision: u32) -> DyadicInterval {
        DyadicInterval::from_rational_bounds(&self.rho_inf_lower, &self.rho_inf_upper, precision)
    }

    /// `v1 + v2 + undecided`; always 32.
    pub fn total(&self) -> Rational {
        &self.v1 + &self.v2 + &self.undecided
    }
}

#[derive(Clone, Debug)]
pub struct BoundsConfig {
    pub depth: u32,
    pub method: Method,
    /// 0 means the global rayon pool.
    pub workers: usize,
    /// Written after every batch of finished frontier boxes.
    pub checkpoint: Option<PathBuf>,
    /// Continue from this checkpoint instead of starting over.
    pub resume: Option<PathBuf>,
    pub max_pending: usize,
}

impl BoundsConfig {
    pub fn new(depth: u32, method: Method) -> Self {
        BoundsConfig { depth, method, workers: 0, checkpoint: None, resume: None, max_pending: DEFAULT_MAX_PENDING }
    }
}

/// State of an unfinished run: accumulated volumes and the pending queue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub method: Method,
    pub depth: u32,
    pub regions: Vec<RegionReport>,
    /// `(region, depth, l, u)` of every pending box.
    pub pending: Vec<(usize, u32, [Dyadic; 5], [Dyadic; 5])>,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut s = format!("{HEADER} method={} depth={}\n", self.method, self.depth);
        for (i, r) in self.regions.iter().enumerate() {
            s += &format!(
                "region {i} {} weight={} v1={} v2={} undecided={} boxes={}\n",
                r.name, r.weight, r.v1, r.v2, r.undecided, r.boxes
            );
        }
        for (region, depth, l, u) in &self.pending {
            s += &format!("box {region} {depth}");
            for c in l.iter().chain(u) {
                s += &format!(" {c}");
            }
            s.push('\n');
        }
        s += "end\n";
        s
    }

    pub fn parse(text: &str) -> Result<Checkpoint> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| bad("empty file"))?;
        let rest = head.strip_prefix(HEADER).ok_or_else(|| bad("missing header"))?;
        let mut method = None;
        let mut depth = None;
        for tok in rest.split_whitespace() {
            match tok.split_once('=') {
                Some(("method", m)) => method = Some(m.parse::<Method>().map_err(|e| bad(&e))?),
                Some(("depth", d)) => depth = Some(d.parse::<u32>().map_err(|_| bad("bad depth"))?),
                _ => return Err(bad("unexpected header field")),
            }
        }
        let method = method.ok_or_else(|| bad("header lacks method"))?;
        let depth = depth.ok_or_else(|| bad("header lacks depth"))?;
        let dy = |s: &str| s.parse::<Dyadic>().map_err(|e| Error::Checkpoint(e.to_string()));
        let mut regions = Vec::new();
        let mut pending = Vec::new();
        let mut ended = false;
        for line in lines {
            if ended {
                return Err(bad("data after end marker"));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                Some(&"region") => {
                    if toks.len() != 8 || toks[1] != regions.len().to_string() {
                        return Err(bad("malformed region line"));
                    }
                    let field = |t: &str, key: &str| -> Result<String> {
                        t.strip_prefix(key).and_then(|v| v.strip_prefix('=')).map(str::to_string).ok_or_else(|| bad("malformed region field"))
                    };
                    let expect = regions_of(method).get(regions.len()).ok_or_else(|| bad("too many regions"))?;
                    let r = RegionReport {
                        name: toks[2].to_string(),
                        weight: field(toks[3], "weight")?.parse().map_err(|_| bad("bad weight"))?,
                        volume: Dyadic::from_int(1 << log2_volume(method, expect)),
                        v1: dy(&field(toks[4], "v1")?)?,
                        v2: dy(&field(toks[5], "v2")?)?,
                        undecided: dy(&field(toks[6], "undecided")?)?,
                        boxes: field(toks[7], "boxes")?.parse().map_err(|_| bad("bad box count"))?,
                    };
                    if r.name != expect.name || r.weight != expect.weight {
                        return Err(bad("region does not match method"));
                    }
                    regions.push(r);
                }
                Some(&"box") => {
                    if toks.len() != 13 {
                        return Err(bad("malformed box line"));
                    }
                    let region: usize = toks[1].parse().map_err(|_| bad("bad region index"))?;
                    let d: u32 = toks[2].parse().map_err(|_| bad("bad box depth"))?;
                    let mut c = Vec::with_capacity(10);
                    for t in &toks[3..] {
                        c.push(dy(t)?);
                    }
                    let u: [Dyadic; 5] = c.split_off(5).try_into().expect("five entries");
                    let l: [Dyadic; 5] = c.try_into().expect("five entries");
                    pending.push((region, d, l, u));
                }
                Some(&"end") => ended = true,
                _ => return Err(bad("unrecognized line")),
            }
        }
        if !ended {
            return Err(bad("truncated (no end marker)"));
        }
        if regions.len() != regions_of(method).len() {
            return Err(bad("missing region lines"));
        }
        Ok(Checkpoint { method, depth, regions, pending })
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        Checkpoint::parse(&text)
    }

    /// Writes through a temporary file so a crash never leaves a torn file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.render())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Volume still to be decided, in region units.
    pub fn pending_volume(&self, region: usize) -> Dyadic {
        let lv = log2_volume(self.method, &regions_of(self.method)[region]);
        self.pending
            .iter()
            .filter(|b| b.0 == region)
            .fold(Dyadic::zero(), |acc, b| &acc + &Dyadic::new(BigInt::one(), lv - b.1 as i64))
    }

    /// `v1 + v2 + undecided + pending` equals the region volume for every region.
    pub fn is_consistent(&self) -> bool {
        self.regions
            .iter()
            .enumerate()
            .all(|(i, r)| &(&(&r.v1 + &r.v2) + &r.undecided) + &self.pending_volume(i) == r.volume)
    }
}

struct Run {
    method: Method,
    depth: u32,
    scale: u32,
    regions: Vec<RegionReport>,
    pending: Vec<GridBox>,
}

impl Run {
    fn fresh(method: Method, depth: u32) -> Self {
        let scale = grid_scale(method, depth);
        let rs = regions_of(method);
        Run {
            method,
            depth,
            scale,
            regions: rs.iter().map(|r| RegionReport::empty(r, method)).collect(),
            pending: rs.iter().enumerate().map(|(i, r)| GridBox::root(r, i, scale)).collect(),
        }
    }

    fn from_checkpoint(c: Checkpoint, method: Method, depth: u32) -> Result<Self> {
        if c.method != method || c.depth != depth {
            return Err(Error::Checkpoint(format!(
                "checkpoint is for method={} depth={}, not method={method} depth={depth}",
                c.method, c.depth
            )));
        }
        if !c.is_consistent() {
            return Err(Error::Checkpoint("volumes do not add up".into()));
        }
        let scale = grid_scale(method, depth);
        let rs = regions_of(method);
        let mut pending = Vec::with_capacity(c.pending.len());
        for (region, d, l, u) in &c.pending {
            let bad = || Error::Checkpoint("box is not on the grid of this run".into());
            let r = rs.get(*region).ok_or_else(bad)?;
            let grid = |v: &Dyadic| -> Result<i64> {
                use num_traits::ToPrimitive;
                v.numerator_at_scale(scale as i64).and_then(|n| n.to_i64()).ok_or_else(bad)
            };
            let b = GridBox {
                region: *region,
                depth: *d,
                l: [grid(&l[0])?, grid(&l[1])?, grid(&l[2])?, grid(&l[3])?, grid(&l[4])?],
                u: [grid(&u[0])?, grid(&u[1])?, grid(&u[2])?, grid(&u[3])?, grid(&u[4])?],
            };
            let one = 1i64 << scale;
            let inside = (0..5).all(|i| -one <= b.l[i] && b.l[i] <= b.u[i] && b.u[i] <= one);
            let pinned = r.fixed.is_none_or(|(k, s)| b.l[k] == s as i64 * one && b.u[k] == s as i64 * one)
                && (!r.half || b.l[1] >= 0);
            if !inside || !pinned || *d > depth {
                return Err(bad());
            }
            pending.push(b);
        }
        Ok(Run { method, depth, scale, regions: c.regions, pending })
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            method: self.method,
            depth: self.depth,
            regions: self.regions.clone(),
            pending: self
                .pending
                .iter()
                .map(|b| {
                    let (l, u) = b.to_dyadic(self.scale);
                    (b.region, b.depth, l, u)
                })
                .collect(),
        }
    }

    fn absorb(&mut self, tallies: &[Tally]) {
        for ((r, t), g) in self.regions.iter_mut().zip(tallies).zip(regions_of(self.method)) {
            r.absorb(t, log2_volume(self.method, g), self.depth);
        }
    }

    fn fixed(&self, region: usize) -> Option<(usize, i8)> {
        regions_of(self.method)[region].fixed
    }

    /// One breadth-first level over the whole queue.
    fn expand(&mut self) {
        let (depth, method) = (self.depth, self.method);
        let results: Vec<(usize, Tally, Option<(GridBox, GridBox)>)> = self
            .pending
            .par_iter()
            .map(|b| {
                let mut t = Tally::new(depth);
                let kids = step(b, depth, regions_of(method)[b.region].fixed, &mut t);
                (b.region, t, kids)
            })
            .collect();
        let mut tallies: Vec<Tally> = (0..self.regions.len()).map(|_| Tally::new(depth)).collect();
        let mut next = Vec::new();
        for (region, t, kids) in results {
            tallies[region].merge(&t);
            if let Some((lo, hi)) = kids {
                next.push(lo);
                next.push(hi);
            }
        }
        self.absorb(&tallies);
        self.pending = next;
    }

    fn save(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => self.checkpoint().save(p),
            None => Ok(()),
        }
    }

    fn drive(&mut self, cfg: &BoundsConfig) -> Result<()> {
        let path = cfg.checkpoint.as_deref();
        while !self.pending.is_empty() && self.pending.len() < FRONTIER_TARGET {
            self.expand();
            if self.pending.len() > cfg.max_pending {
                self.save(path)?;
                return Err(Error::Resource {
                    message: format!("{} pending boxes exceed the bound {}", self.pending.len(), cfg.max_pending),
                    checkpoint: path.map(Path::to_path_buf),
                });
            }
        }
        self.save(path)?;
        while !self.pending.is_empty() {
            let take = self.pending.len().min(BATCH);
            let batch: Vec<GridBox> = self.pending.drain(..take).collect();
            let results: Vec<(usize, Tally)> = batch
                .into_par_iter()
                .map(|b| {
                    let r = b.region;
                    (r, finish(b, self.depth, self.fixed(r)))
                })
                .collect();
            let mut tallies: Vec<Tally> = (0..self.regions.len()).map(|_| Tally::new(self.depth)).collect();
            for (r, t) in &results {
                tallies[*r].merge(t);
            }
            self.absorb(&tallies);
            self.save(path)?;
        }
        Ok(())
    }
}

/// Bounds for `rho(inf)` at the given bisection depth.
pub fn run_bounds(depth: u32, method: Method, workers: usize, checkpoint: Option<&Path>) -> Result<BoundsReport> {
    let mut cfg = BoundsConfig::new(depth, method);
    cfg.workers = workers;
    cfg.checkpoint = checkpoint.map(Path::to_path_buf);
    run_bounds_with(&cfg)
}

pub fn run_bounds_with(cfg: &BoundsConfig) -> Result<BoundsReport> {
    let mut run = match &cfg.resume {
        Some(path) => Run::from_checkpoint(Checkpoint::load(path)?, cfg.method, cfg.depth)?,
        None => Run::fresh(cfg.method, cfg.depth),
    };
    with_workers(cfg.workers, || run.drive(cfg))??;
    Ok(BoundsReport::assemble(cfg.method, cfg.depth, run.regions))
}

/// Every final leaf of the subdivision with its label, in depth-first
/// order. Meant for small depths (the count grows geometrically).
pub fn collect_leaves(method: Method, depth: u32) -> Vec<(DyadicBox, BoxVerdict)> {
    let scale = grid_scale(method, depth);
    let mut out = Vec::new();
    for (i, r) in regions_of(method).iter().enumerate() {
        let mut stack = vec![GridBox::root(r, i, scale)];
        while let Some(b) = stack.pop() {
            let v = classify_grid(&b.l, &b.u);
            if v == BoxVerdict::Undecided && b.depth < depth {
                let (lo, hi) = b.split(r.fixed);
                stack.push(hi);
                stack.push(lo);
            } else {
                let (l, u) = b.to_dyadic(scale);
                out.push((DyadicBox { l, u, fixed_face: r.fixed }, v));
            }
        }
    }
    out
}
