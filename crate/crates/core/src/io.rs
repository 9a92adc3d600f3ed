//! Wire formats: binary columnar path sets with JSON manifests, driving
//! function CSV import/export, and envelope exports (CSV and SVG). The
//! readers validate untrusted input defensively and report positions in
//! parse errors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cle::LoopEnsemble;
use crate::error::{Error, Result};
use crate::envelope::EnvelopeCurve;
use crate::excursion::{Excursion, ExcursionSet, TimedPath};
use crate::kernel::BoundaryPoint;
use crate::loewner::{DrivingFunction, ForceTrack};
use crate::measure::BoundaryMeasure;

/// Hard bounds applied when reading untrusted payloads.
const MAX_PATHS: u64 = 1 << 24;
const MAX_POINTS: u64 = 1 << 28;

/// FNV-1a hash of the canonical measure JSON; identifies the measure in
/// manifests.
pub fn measure_hash(nu: &BoundaryMeasure) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in nu.to_json().as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExcursionManifest {
    pub nu_hash: String,
    pub eps_exc: f64,
    pub seed: u64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopManifest {
    pub kappa: f64,
    pub c: f64,
    pub eps_cle: f64,
    pub grid_n: usize,
    pub count: usize,
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64_slice(out: &mut Vec<u8>, vs: impl Iterator<Item = f64>) {
    for v in vs {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn u64(&mut self) -> Result<u64> {
        if self.pos + 8 > self.buf.len() {
            return Err(Error::Parse(format!(
                "payload truncated at byte {}",
                self.pos
            )));
        }
        let mut b = [0u8; 8];
        b.copy_from_slice(&self.buf[self.pos..self.pos + 8]);
        self.pos += 8;
        Ok(u64::from_le_bytes(b))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn f64_vec(&mut self, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.f64()?);
        }
        Ok(out)
    }

    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

/// Serialize an excursion set: `(manifest json, binary payload)`. The
/// payload is columnar per path: point count, then the `re`, `im` and time
/// arrays, with the two endpoint angles appended.
pub fn write_excursion_set(set: &ExcursionSet, seed: u64) -> (String, Vec<u8>) {
    let manifest = ExcursionManifest {
        nu_hash: measure_hash(&set.nu),
        eps_exc: set.eps_exc,
        seed,
        count: set.excursions.len(),
    };
    let mut payload = Vec::new();
    put_u64(&mut payload, set.excursions.len() as u64);
    for exc in &set.excursions {
        put_u64(&mut payload, exc.path.points.len() as u64);
        put_f64_slice(&mut payload, exc.path.points.iter().map(|p| p.re));
        put_f64_slice(&mut payload, exc.path.points.iter().map(|p| p.im));
        put_f64_slice(&mut payload, exc.path.times.iter().cloned());
        put_f64_slice(
            &mut payload,
            [exc.start.measure_angle(), exc.end.measure_angle()].into_iter(),
        );
    }
    (
        serde_json::to_string(&manifest).expect("manifest serializes"),
        payload,
    )
}

/// Parse an excursion set payload against its manifest.
pub fn read_excursion_set(
    manifest_json: &str,
    payload: &[u8],
    nu: &BoundaryMeasure,
) -> Result<ExcursionSet> {
    let manifest: ExcursionManifest = serde_json::from_str(manifest_json)?;
    let mut r = Reader::new(payload);
    let count = r.u64()?;
    if count > MAX_PATHS {
        return Err(Error::Parse(format!("path count {count} exceeds bound")));
    }
    if count as usize != manifest.count {
        return Err(Error::Parse(format!(
            "manifest count {} disagrees with payload count {count}",
            manifest.count
        )));
    }
    let mut excursions = Vec::with_capacity(count as usize);
    for k in 0..count {
        let n = r.u64()?;
        if n < 2 || n > MAX_POINTS {
            return Err(Error::Parse(format!("path {k} has invalid length {n}")));
        }
        let n = n as usize;
        let re = r.f64_vec(n)?;
        let im = r.f64_vec(n)?;
        let times = r.f64_vec(n)?;
        let angles = r.f64_vec(2)?;
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("path {k} contains non-finite points")));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse(format!("path {k} has a bad clock")));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Parse(format!("path {k} has bad endpoint angles")));
        }
        let points: Vec<Complex64> = re
            .into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect();
        excursions.push(Excursion {
            path: TimedPath { points, times },
            start: BoundaryPoint::from_measure_angle(angles[0]),
            end: BoundaryPoint::from_measure_angle(angles[1]),
        });
    }
    if !r.done() {
        return Err(Error::Parse(format!(
            "trailing bytes after path {} at offset {}",
            count, r.pos
        )));
    }
    Ok(ExcursionSet {
        excursions,
        nu: nu.clone(),
        eps_exc: manifest.eps_exc,
    })
}

/// Serialize a loop ensemble in the same binary-plus-manifest layout.
pub fn write_loop_ensemble(ens: &LoopEnsemble) -> (String, Vec<u8>) {
    let manifest = LoopManifest {
        kappa: ens.kappa,
        c: ens.c,
        eps_cle: ens.eps_cle,
        grid_n: ens.grid_n,
        count: ens.loops.len(),
    };
    let mut payload = Vec::new();
    put_u64(&mut payload, ens.loops.len() as u64);
    for l in &ens.loops {
        put_u64(&mut payload, l.len() as u64);
        put_f64_slice(&mut payload, l.iter().map(|p| p.re));
        put_f64_slice(&mut payload, l.iter().map(|p| p.im));
    }
    (
        serde_json::to_string(&manifest).expect("manifest serializes"),
        payload,
    )
}

pub fn read_loop_ensemble(manifest_json: &str, payload: &[u8]) -> Result<LoopEnsemble> {
    let manifest: LoopManifest = serde_json::from_str(manifest_json)?;
    let mut r = Reader::new(payload);
    let count = r.u64()?;
    if count > MAX_PATHS {
        return Err(Error::Parse(format!("loop count {count} exceeds bound")));
    }
    let mut loops = Vec::with_capacity(count as usize);
    for k in 0..count {
        let n = r.u64()?;
        if n < 3 || n > MAX_POINTS {
            return Err(Error::Parse(format!("loop {k} has invalid length {n}")));
        }
        let n = n as usize;
        let re = r.f64_vec(n)?;
        let im = r.f64_vec(n)?;
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("loop {k} contains non-finite points")));
        }
        let pts: Vec<Complex64> = re
            .into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect();
        if (pts[0] - pts[n - 1]).norm() > 1e-9 {
            return Err(Error::Parse(format!("loop {k} is not closed")));
        }
        loops.push(pts);
    }
    if !r.done() {
        return Err(Error::Parse("trailing bytes after loops".into()));
    }
    Ok(LoopEnsemble {
        loops,
        cluster_cells: vec![],
        kappa: manifest.kappa,
        c: manifest.c,
        eps_cle: manifest.eps_cle,
        grid_n: manifest.grid_n,
    })
}

/// Driving function CSV: header `t,xi[,v1..,vK]`, one row per sample.
pub fn driver_to_csv(d: &DrivingFunction) -> String {
    let mut out = String::from("t,xi");
    for k in 0..d.force_tracks.len() {
        out.push_str(&format!(",v{}", k + 1));
    }
    out.push('\n');
    for i in 0..d.times.len() {
        out.push_str(&format!("{:.12e},{:.12e}", d.times[i], d.xi[i]));
        for tr in &d.force_tracks {
            out.push_str(&format!(",{:.12e}", tr.values[i]));
        }
        out.push('\n');
    }
    out
}

/// Parse the driving-function CSV format, with row/column positions in
/// every error.
pub fn driver_from_csv(text: &str) -> Result<DrivingFunction> {
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h.trim(),
        None => return Err(Error::Parse("empty driver csv".into())),
    };
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    if cols.len() < 2 || cols[0] != "t" || cols[1] != "xi" {
        return Err(Error::Parse(format!(
            "line 1: expected header starting with 't,xi', got '{header}'"
        )));
    }
    for (k, c) in cols.iter().enumerate().skip(2) {
        if *c != format!("v{}", k - 1) {
            return Err(Error::Parse(format!(
                "line 1, column {}: expected force column 'v{}', got '{c}'",
                k + 1,
                k - 1
            )));
        }
    }
    let k_forces = cols.len() - 2;
    let mut times = Vec::new();
    let mut xi = Vec::new();
    let mut tracks: Vec<Vec<f64>> = vec![Vec::new(); k_forces];
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, got {}",
                lineno + 1,
                cols.len(),
                fields.len()
            )));
        }
        let parse = |s: &str, col: usize| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "line {}, column {}: bad number '{}'",
                    lineno + 1,
                    col + 1,
                    s
                ))
            })
        };
        let t = parse(fields[0], 0)?;
        let x = parse(fields[1], 1)?;
        if !t.is_finite() || !x.is_finite() {
            return Err(Error::Parse(format!("line {}: non-finite value", lineno + 1)));
        }
        if let Some(prev) = times.last() {
            if t <= *prev {
                return Err(Error::Parse(format!(
                    "line {}: time {} does not increase past {}",
                    lineno + 1,
                    t,
                    prev
                )));
            }
        }
        times.push(t);
        xi.push(x);
        for (k, track) in tracks.iter_mut().enumerate() {
            track.push(parse(fields[2 + k], 2 + k)?);
        }
    }
    if times.is_empty() {
        return Err(Error::Parse("driver csv has no data rows".into()));
    }
    let force_tracks = tracks
        .into_iter()
        .map(|values| ForceTrack {
            x0: values.first().copied().unwrap_or(0.0),
            values,
        })
        .collect();
    Ok(DrivingFunction {
        times,
        xi,
        force_tracks,
    })
}

/// Envelope curve CSV `(t_index,x,y)`.
pub fn envelope_to_csv(curve: &EnvelopeCurve) -> String {
    let mut out = String::from("t_index,x,y\n");
    for (k, p) in curve.points.iter().enumerate() {
        out.push_str(&format!("{k},{:.9e},{:.9e}\n", p.re, p.im));
    }
    out
}

/// Minimal SVG dump: the occupancy mask (downsampled to at most 256 blocks
/// per side) with the envelope polyline on top.
pub fn envelope_to_svg(curve: &EnvelopeCurve) -> String {
    let size = 640.0;
    let to_px = |p: Complex64| ((p.re + 1.0) * size / 2.0, (1.0 - p.im) * size / 2.0);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    s.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        size / 2.0,
        size / 2.0,
        size / 2.0
    ));
    let n = curve.grid_n;
    let block = (n / 256).max(1);
    let bpx = size * block as f64 / n as f64;
    for bi in (0..n).step_by(block) {
        for bj in (0..n).step_by(block) {
            let mut occupied = false;
            'blk: for i in bi..(bi + block).min(n) {
                for j in bj..(bj + block).min(n) {
                    if curve.blocked.get(i, j) {
                        occupied = true;
                        break 'blk;
                    }
                }
            }
            if occupied {
                let x = size * bj as f64 / n as f64;
                let y = size * (1.0 - (bi + block) as f64 / n as f64);
                s.push_str(&format!(
                    "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bpx:.1}\" height=\"{bpx:.1}\" fill=\"#b0c4de\"/>\n"
                ));
            }
        }
    }
    s.push_str("<polyline fill=\"none\" stroke=\"#c00\" stroke-width=\"1.2\" points=\"");
    for p in &curve.points {
        let (x, y) = to_px(*p);
        s.push_str(&format!("{x:.1},{y:.1} "));
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::{sample_process, ProcessParams};
    use crate::rng;

    #[test]
    fn excursion_set_round_trips() {
        let nu = BoundaryMeasure::constant_on_left_arc(0.8);
        let mut r = rng::stream(50, 0);
        let params = ProcessParams {
            eps_exc: 0.3,
            step: 2e-3,
            ..ProcessParams::default()
        };
        let set = sample_process(&nu, &params, &mut r).unwrap();
        let (manifest, payload) = write_excursion_set(&set, 50);
        let back = read_excursion_set(&manifest, &payload, &nu).unwrap();
        assert_eq!(back.excursions.len(), set.excursions.len());
        for (a, b) in back.excursions.iter().zip(set.excursions.iter()) {
            assert_eq!(a.path.points, b.path.points);
            assert_eq!(a.path.times, b.path.times);
        }
    }

    #[test]
    fn corrupt_payloads_are_rejected_with_positions() {
        let nu = BoundaryMeasure::constant_on_left_arc(0.5);
        let set = ExcursionSet {
            excursions: vec![],
            nu: nu.clone(),
            eps_exc: 0.1,
        };
        let (manifest, mut payload) = write_excursion_set(&set, 1);
        payload.truncate(4);
        let err = read_excursion_set(&manifest, &payload, &nu).unwrap_err();
        assert!(format!("{err}").contains("truncated"));
        let err2 = read_excursion_set("{", &payload, &nu).unwrap_err();
        assert!(format!("{err2}").contains("line"));
    }

    #[test]
    fn driver_csv_round_trip_and_errors() {
        let d = DrivingFunction {
            times: vec![0.0, 0.1, 0.2],
            xi: vec![0.0, 0.5, -0.25],
            force_tracks: vec![ForceTrack {
                x0: -1.0,
                values: vec![-1.0, -0.9, -0.8],
            }],
        };
        let csv = driver_to_csv(&d);
        let back = driver_from_csv(&csv).unwrap();
        assert_eq!(back.times.len(), 3);
        assert!((back.xi[1] - 0.5).abs() < 1e-12);
        assert_eq!(back.force_tracks.len(), 1);

        let bad = "t,xi\n0.0,0.0\n0.0,1.0\n";
        let err = driver_from_csv(bad).unwrap_err();
        assert!(format!("{err}").contains("line 3"));
        let bad2 = "t,xi\n0.0,zap\n";
        let err2 = driver_from_csv(bad2).unwrap_err();
        assert!(format!("{err2}").contains("column 2"));
    }

    #[test]
    fn loop_ensemble_round_trips() {
        let square: Vec<Complex64> = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.2, 0.0),
            Complex64::new(0.2, 0.2),
            Complex64::new(0.0, 0.0),
        ];
        let ens = LoopEnsemble {
            loops: vec![square],
            cluster_cells: vec![],
            kappa: 4.0,
            c: 1.0,
            eps_cle: 0.05,
            grid_n: 128,
        };
        let (m, p) = write_loop_ensemble(&ens);
        let back = read_loop_ensemble(&m, &p).unwrap();
        assert_eq!(back.loops, ens.loops);
        assert_eq!(back.kappa, 4.0);
    }
}
