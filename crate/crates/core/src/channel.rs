//! Clustered multipath channel generation for single-antenna nodes received
//! by a uniform rectangular array.
//!
//! Each node sees a fixed number of clusters. A cluster has a central azimuth
//! and a handful of components scattered around it in azimuth and elevation,
//! each with complex-normal small-scale fading. The strongest cluster is
//! amplified to give the channel a clear dominant direction, then the row is
//! scaled to unit average power per antenna.
//!
//! Array convention: element `(r, c)` sits at row `r`, column `c`, stored at
//! index `r * cols + c`. A plane wave arriving from azimuth `az` and elevation
//! `el` (both radians; `π/2` is broadside for either) produces the phase
//! `2π·d·(r·cos(el) + c·sin(el)·cos(az))` at that element, with `d` the
//! element spacing in wavelengths.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{NodeId, NodeProfile};

/// Rectangular array layout. `spacing` is in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        ArrayGeometry {
            rows: 10,
            cols: 10,
            spacing: 0.5,
        }
    }
}

impl ArrayGeometry {
    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    fn add_response(&self, azimuth: f64, elevation: f64, weight: Complex64, out: &mut [Complex64]) {
        let k = TAU * self.spacing;
        let row_step = k * elevation.cos();
        let col_step = k * elevation.sin() * azimuth.cos();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let phase = r as f64 * row_step + c as f64 * col_step;
                out[r * self.cols + c] += weight * Complex64::from_polar(1.0, phase);
            }
        }
    }
}

/// Plane-wave response of the array; every entry has unit magnitude.
pub fn steering_vector(
    azimuth: f64,
    elevation: f64,
    geometry: &ArrayGeometry,
    num_antennas: usize,
) -> Result<Vec<Complex64>> {
    if geometry.num_elements() != num_antennas {
        return Err(Error::Config(format!(
            "array of {}x{} elements does not have {num_antennas} antennas",
            geometry.rows, geometry.cols
        )));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); num_antennas];
    geometry.add_response(azimuth, elevation, Complex64::new(1.0, 0.0), &mut v);
    Ok(v)
}

/// Parameters of one generated scenario. Angles are given in degrees here and
/// converted once on use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_nodes: usize,
    pub num_antennas: usize,
    pub num_pilots: usize,
    pub num_groups: usize,
    pub num_clusters: usize,
    pub components_per_cluster: usize,
    pub central_angle_range_deg: [f64; 2],
    pub component_angle_mean_deg: f64,
    pub amplification_range: [f64; 2],
    pub snr_db: f64,
    pub carrier_frequency_hz: f64,
    pub array: ArrayGeometry,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            num_nodes: 15,
            num_antennas: 100,
            num_pilots: 12,
            num_groups: 3,
            num_clusters: 4,
            components_per_cluster: 10,
            central_angle_range_deg: [45.0, 135.0],
            component_angle_mean_deg: 7.5,
            amplification_range: [2.0, 6.0],
            snr_db: 20.0,
            carrier_frequency_hz: 2.47e9,
            array: ArrayGeometry::default(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("num_nodes", self.num_nodes),
            ("num_antennas", self.num_antennas),
            ("num_pilots", self.num_pilots),
            ("num_groups", self.num_groups),
            ("components_per_cluster", self.components_per_cluster),
        ] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.num_clusters < 2 {
            return fail("num_clusters must be at least 2 to define an angular spread".into());
        }
        let [lo, hi] = self.central_angle_range_deg;
        if !(0.0 <= lo && lo <= hi && hi <= 180.0) {
            return fail(format!("central angle range [{lo}, {hi}] must lie within [0, 180] degrees"));
        }
        if !(self.component_angle_mean_deg > 0.0 && self.component_angle_mean_deg.is_finite()) {
            return fail("component_angle_mean_deg must be positive".into());
        }
        let [a_lo, a_hi] = self.amplification_range;
        if !(0.0 < a_lo && a_lo <= a_hi && a_hi.is_finite()) {
            return fail(format!("amplification range [{a_lo}, {a_hi}] is invalid"));
        }
        if !self.snr_db.is_finite() {
            return fail("snr_db must be finite".into());
        }
        if !(self.array.spacing > 0.0 && self.array.spacing.is_finite()) {
            return fail("element spacing must be positive".into());
        }
        if self.array.num_elements() != self.num_antennas {
            return fail(format!(
                "array of {}x{} elements does not have {} antennas",
                self.array.rows, self.array.cols, self.num_antennas
            ));
        }
        Ok(())
    }

    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub azimuth_offset: f64,
    pub elevation_offset: f64,
    pub gain: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub central_azimuth: f64,
    pub components: Vec<Component>,
    /// Received power: `M · Σ|gain|²`, with gains as they enter the final
    /// (amplified, normalized) channel row.
    pub power: f64,
}

impl ClusterSpec {
    fn update_power(&mut self, num_antennas: usize) {
        self.power = num_antennas as f64 * self.components.iter().map(|c| c.gain.norm_sqr()).sum::<f64>();
    }
}

/// Dense complex matrix, one row per node, one column per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("channel rows differ in length".into()));
        }
        let n = rows.len();
        Ok(ChannelMatrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.data[k * self.cols..(k + 1) * self.cols]
    }

    /// `‖h_k‖²`.
    pub fn row_power(&self, k: usize) -> f64 {
        self.row(k).iter().map(|h| h.norm_sqr()).sum()
    }
}

/// A generated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub config: ExperimentConfig,
    pub profiles: Vec<NodeProfile>,
    pub channel: ChannelMatrix,
    /// Per-node clusters. Empty when the instance was read from a file.
    pub clusters: Vec<Vec<ClusterSpec>>,
    pub snr_linear: f64,
}

impl ChannelInstance {
    pub fn num_nodes(&self) -> usize {
        self.profiles.len()
    }

    /// Assembles an instance from parts, checking shapes.
    pub fn from_parts(
        config: ExperimentConfig,
        profiles: Vec<NodeProfile>,
        channel: ChannelMatrix,
        snr_linear: f64,
    ) -> Result<Self> {
        if channel.rows() != profiles.len() {
            return Err(Error::Domain(format!(
                "{} profiles but {} channel rows",
                profiles.len(),
                channel.rows()
            )));
        }
        if !(snr_linear > 0.0 && snr_linear.is_finite()) {
            return Err(Error::Domain(format!("snr must be positive, got {snr_linear}")));
        }
        Ok(ChannelInstance {
            config,
            profiles,
            channel,
            clusters: Vec::new(),
            snr_linear,
        })
    }

    /// Position of the node with the given id in `profiles`.
    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.profiles.iter().position(|p| p.id() == id)
    }
}

/// `Ψ`: spread of the cluster central angles as a fraction of the full circle.
pub fn cluster_angular_spread(clusters: &[ClusterSpec]) -> Result<f64> {
    if clusters.is_empty() {
        return Err(Error::Domain("cluster angular spread needs at least one cluster".into()));
    }
    let (lo, hi) = clusters.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        (lo.min(c.central_azimuth), hi.max(c.central_azimuth))
    });
    Ok((hi - lo) / TAU)
}

fn dominant_cluster(clusters: &[ClusterSpec]) -> usize {
    let mut best = 0;
    for (i, c) in clusters.iter().enumerate().skip(1) {
        if c.power > clusters[best].power {
            best = i;
        }
    }
    best
}

/// Normalized angular spectrum spread `σ = Ψ·(1 − P_dom / Σ P_other)`,
/// clamped to `[0, 1]`.
pub fn angular_spread(clusters: &[ClusterSpec]) -> Result<f64> {
    if clusters.len() < 2 {
        return Err(Error::Domain(format!(
            "angular spread needs at least 2 clusters, got {}",
            clusters.len()
        )));
    }
    let psi = cluster_angular_spread(clusters)?;
    let dom = dominant_cluster(clusters);
    let dominant = clusters[dom].power;
    let others: f64 = clusters
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != dom)
        .map(|(_, c)| c.power)
        .sum();
    if others <= 0.0 {
        return Ok(0.0);
    }
    Ok((psi * (1.0 - dominant / others)).clamp(0.0, 1.0))
}

fn signed_exp<R: Rng>(rng: &mut R, dist: &Exp<f64>) -> f64 {
    let x = dist.sample(rng);
    if rng.random_bool(0.5) {
        x
    } else {
        -x
    }
}

struct NodeChannel {
    row: Vec<Complex64>,
    clusters: Vec<ClusterSpec>,
    profile: NodeProfile,
}

fn generate_node<R: Rng>(rng: &mut R, id: NodeId, config: &ExperimentConfig) -> Result<NodeChannel> {
    let m = config.num_antennas;
    let [lo, hi] = config.central_angle_range_deg.map(f64::to_radians);
    let offsets = Exp::new(1.0 / config.component_angle_mean_deg.to_radians())
        .map_err(|e| Error::Config(e.to_string()))?;
    let fading = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let total = (config.num_clusters * config.components_per_cluster) as f64;
    let scale = 1.0 / total.sqrt();

    let mut clusters = Vec::with_capacity(config.num_clusters);
    let mut contributions = Vec::with_capacity(config.num_clusters);
    for _ in 0..config.num_clusters {
        let central_azimuth = rng.random_range(lo..=hi);
        let mut contribution = vec![Complex64::new(0.0, 0.0); m];
        let components: Vec<Component> = (0..config.components_per_cluster)
            .map(|_| {
                let azimuth_offset = signed_exp(rng, &offsets);
                let elevation_offset = signed_exp(rng, &offsets);
                let gain = Complex64::new(fading.sample(rng), fading.sample(rng)) * scale;
                config.array.add_response(
                    central_azimuth + azimuth_offset,
                    PI / 2.0 + elevation_offset,
                    gain,
                    &mut contribution,
                );
                Component {
                    azimuth_offset,
                    elevation_offset,
                    gain,
                }
            })
            .collect();
        let mut cluster = ClusterSpec {
            central_azimuth,
            components,
            power: 0.0,
        };
        cluster.update_power(m);
        clusters.push(cluster);
        contributions.push(contribution);
    }

    let dom = dominant_cluster(&clusters);
    let [a_lo, a_hi] = config.amplification_range;
    let amplification = rng.random_range(a_lo..=a_hi);
    for c in &mut clusters[dom].components {
        c.gain *= amplification;
    }
    for h in &mut contributions[dom] {
        *h *= amplification;
    }

    let mut row = vec![Complex64::new(0.0, 0.0); m];
    for contribution in &contributions {
        for (h, x) in row.iter_mut().zip(contribution) {
            *h += x;
        }
    }
    let power: f64 = row.iter().map(|h| h.norm_sqr()).sum();
    let norm = (m as f64 / power).sqrt();
    for h in &mut row {
        *h *= norm;
    }
    for cluster in &mut clusters {
        for c in &mut cluster.components {
            c.gain *= norm;
        }
        cluster.update_power(m);
    }

    let sigma = angular_spread(&clusters)?;
    let profile = NodeProfile::new(id, clusters[dom].central_azimuth, sigma)?;
    Ok(NodeChannel {
        row,
        clusters,
        profile,
    })
}

/// Draws one scenario. The result is a pure function of `config`, including
/// its seed.
pub fn generate_instance(config: &ExperimentConfig) -> Result<ChannelInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut profiles = Vec::with_capacity(config.num_nodes);
    let mut clusters = Vec::with_capacity(config.num_nodes);
    let mut rows = Vec::with_capacity(config.num_nodes);
    for k in 0..config.num_nodes {
        let node = generate_node(&mut rng, k as NodeId, config)?;
        profiles.push(node.profile);
        clusters.push(node.clusters);
        rows.push(node.row);
    }
    Ok(ChannelInstance {
        config: config.clone(),
        profiles,
        channel: ChannelMatrix::from_rows(rows)?,
        clusters,
        snr_linear: config.snr_linear(),
    })
}

/// Generates one instance per config, fanning out across threads when `exec`
/// allows. Output order matches input order.
pub fn generate_batch(configs: &[ExperimentConfig], exec: Exec) -> Vec<Result<ChannelInstance>> {
    exec::map_collect(exec, configs, generate_instance)
}

pub const INSTANCE_FORMAT: &str = "dirgroup-instance";
pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// On-disk form of a [`ChannelInstance`]: one JSON document per instance.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocument {
    format: String,
    version: u32,
    config: ExperimentConfig,
    snr_linear: f64,
    profiles: Vec<NodeProfile>,
    channel: MatrixDocument,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    rows: usize,
    cols: usize,
    /// Row-major `[re, im]` pairs.
    data: Vec<[f64; 2]>,
}

impl ChannelInstance {
    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDocument {
            format: INSTANCE_FORMAT.to_string(),
            version: INSTANCE_FORMAT_VERSION,
            config: self.config.clone(),
            snr_linear: self.snr_linear,
            profiles: self.profiles.clone(),
            channel: MatrixDocument {
                rows: self.channel.rows,
                cols: self.channel.cols,
                data: self.channel.data.iter().map(|h| [h.re, h.im]).collect(),
            },
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if doc.format != INSTANCE_FORMAT {
            return Err(format!("unexpected format tag {:?}", doc.format));
        }
        if doc.version != INSTANCE_FORMAT_VERSION {
            return Err(format!("unsupported format version {}", doc.version));
        }
        let MatrixDocument { rows, cols, data } = doc.channel;
        if rows * cols != data.len() {
            return Err(format!("channel declares {rows}x{cols} but holds {} entries", data.len()));
        }
        if data.iter().flatten().any(|x| !x.is_finite()) {
            return Err("channel contains non-finite entries".into());
        }
        let mut ids: Vec<NodeId> = doc.profiles.iter().map(NodeProfile::id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate node ids".into());
        }
        let channel = ChannelMatrix {
            rows,
            cols,
            data: data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        };
        ChannelInstance::from_parts(doc.config, doc.profiles, channel, doc.snr_linear).map_err(|e| e.to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        ChannelInstance::from_json(&text).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cluster(central_deg: f64, power: f64) -> ClusterSpec {
        ClusterSpec {
            central_azimuth: central_deg.to_radians(),
            components: Vec::new(),
            power,
        }
    }

    #[test]
    fn broadside_is_all_ones() {
        let v = steering_vector(PI / 2.0, PI / 2.0, &ArrayGeometry::default(), 100).unwrap();
        for h in v {
            assert_abs_diff_eq!(h.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn steering_entries_have_unit_magnitude() {
        let g = ArrayGeometry::default();
        for (az, el) in [(0.3, 1.2), (2.0, 0.1), (5.5, 3.0)] {
            for h in steering_vector(az, el, &g, 100).unwrap() {
                assert_abs_diff_eq!(h.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_element_endfire_phase_difference() {
        // two elements along the horizontal axis, half a wavelength apart
        let g = ArrayGeometry {
            rows: 1,
            cols: 2,
            spacing: 0.5,
        };
        let v = steering_vector(0.0, PI / 2.0, &g, 2).unwrap();
        let diff = (v[1] / v[0]).arg().abs();
        assert_abs_diff_eq!(diff, PI, epsilon = 1e-12);
    }

    #[test]
    fn steering_rejects_geometry_mismatch() {
        assert!(matches!(
            steering_vector(0.0, 0.0, &ArrayGeometry::default(), 64),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cluster_spread_examples() {
        assert_abs_diff_eq!(
            cluster_angular_spread(&[cluster(45.0, 1.0), cluster(135.0, 1.0)]).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert_eq!(cluster_angular_spread(&[cluster(70.0, 1.0), cluster(70.0, 2.0)]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            cluster_angular_spread(&[cluster(60.0, 1.0), cluster(80.0, 1.0), cluster(100.0, 1.0)]).unwrap(),
            40.0 / 360.0,
            epsilon = 1e-15
        );
        assert!(matches!(cluster_angular_spread(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn angular_spread_examples() {
        let cs = [
            cluster(45.0, 0.4),
            cluster(135.0, 0.2),
            cluster(90.0, 0.2),
            cluster(100.0, 0.2),
        ];
        assert_abs_diff_eq!(angular_spread(&cs).unwrap(), 1.0 / 12.0, epsilon = 1e-12);

        let strong = [cluster(45.0, 5.0), cluster(135.0, 1.0), cluster(90.0, 1.0)];
        assert_eq!(angular_spread(&strong).unwrap(), 0.0);

        assert!(matches!(angular_spread(&[cluster(45.0, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn spread_approaches_psi_as_dominant_share_vanishes() {
        // n equal clusters: P_dom / ΣP_other = 1/(n-1) → 0, so σ → Ψ = 0.25
        let mut last = 0.0;
        for n in [3usize, 11, 101, 1001] {
            let cs: Vec<_> = (0..n)
                .map(|i| cluster(if i % 2 == 0 { 45.0 } else { 135.0 }, 1.0))
                .collect();
            let sigma = angular_spread(&cs).unwrap();
            assert_abs_diff_eq!(sigma, 0.25 * (1.0 - 1.0 / (n as f64 - 1.0)), epsilon = 1e-12);
            assert!(sigma > last);
            last = sigma;
        }
        assert!(0.25 - last < 1e-3);
    }

    #[test]
    fn generated_instance_shape() {
        let config = ExperimentConfig {
            seed: 7,
            ..ExperimentConfig::default()
        };
        let inst = generate_instance(&config).unwrap();
        assert_eq!(inst.channel.rows(), 15);
        assert_eq!(inst.channel.cols(), 100);
        assert_eq!(inst.profiles.len(), 15);
        assert_eq!(inst.clusters.len(), 15);
        for (k, cs) in inst.clusters.iter().enumerate() {
            assert_eq!(cs.len(), 4);
            assert!(cs.iter().all(|c| c.components.len() == 10));
            assert_abs_diff_eq!(inst.channel.row_power(k), 100.0, epsilon = 1e-9);
            let theta = inst.profiles[k].theta();
            assert!((45f64.to_radians()..=135f64.to_radians()).contains(&theta));
        }
        assert_abs_diff_eq!(inst.snr_linear, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn generation_is_reproducible() {
        let config = ExperimentConfig {
            seed: 99,
            num_nodes: 5,
            ..ExperimentConfig::default()
        };
        assert_eq!(generate_instance(&config).unwrap(), generate_instance(&config).unwrap());
        let other = ExperimentConfig { seed: 100, ..config.clone() };
        assert_ne!(generate_instance(&config).unwrap().channel, generate_instance(&other).unwrap().channel);
    }

    #[test]
    fn batch_matches_single_generation() {
        let configs: Vec<_> = (0..4)
            .map(|s| ExperimentConfig {
                seed: s,
                num_nodes: 3,
                ..ExperimentConfig::default()
            })
            .collect();
        let seq = generate_batch(&configs, Exec::Sequential);
        let par = generate_batch(&configs, Exec::Parallel);
        for (a, b) in seq.into_iter().zip(par) {
            assert_eq!(a.unwrap(), b.unwrap());
        }
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        let bad = [
            ExperimentConfig { num_nodes: 0, ..ok.clone() },
            ExperimentConfig { num_antennas: 64, ..ok.clone() },
            ExperimentConfig { num_clusters: 1, ..ok.clone() },
            ExperimentConfig { central_angle_range_deg: [100.0, 200.0], ..ok.clone() },
            ExperimentConfig { central_angle_range_deg: [100.0, 50.0], ..ok.clone() },
            ExperimentConfig { amplification_range: [0.0, 2.0], ..ok.clone() },
            ExperimentConfig { component_angle_mean_deg: -1.0, ..ok.clone() },
        ];
        for c in bad {
            assert!(matches!(generate_instance(&c), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let config = ExperimentConfig {
            seed: 3,
            num_nodes: 4,
            ..ExperimentConfig::default()
        };
        let inst = generate_instance(&config).unwrap();
        let back = ChannelInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back.profiles, inst.profiles);
        assert_eq!(back.channel, inst.channel);
        assert_eq!(back.config, inst.config);
        assert_eq!(back.snr_linear, inst.snr_linear);
        assert!(back.clusters.is_empty());
    }

    #[test]
    fn json_rejects_corrupt_documents() {
        let config = ExperimentConfig {
            num_nodes: 2,
            ..ExperimentConfig::default()
        };
        let text = generate_instance(&config).unwrap().to_json().unwrap();
        assert!(ChannelInstance::from_json(&text.replace("\"rows\": 2", "\"rows\": 3")).is_err());
        assert!(ChannelInstance::from_json(&text.replace(INSTANCE_FORMAT, "other")).is_err());
        assert!(ChannelInstance::from_json(&text[..text.len() / 2]).is_err());
        assert!(ChannelInstance::from_json("{}").is_err());
    }
}
