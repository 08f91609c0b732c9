//! JSON wire formats shared across the tools.
//!
//! States: `{"dim": d, "matrix": [[[re, im], ...], ...]}` (row-major).
//! Hamiltonians: the same schema with `"kind": "hamiltonian"`.
//! Probability vectors: `{"p": [..]}`.
//! Channels: bath spec, seed and the global unitary with [re, im] entries.

use crate::error::{Error, Result};
use crate::linops::ComplexMatrix;
use crate::purity::ProbVector;
use crate::states::{DensityMatrix, Hamiltonian};
use crate::thermalops::{BathSpec, QuantumChannel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(kind: Option<&str>, m: &ComplexMatrix) -> Self {
        let matrix = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let z = m.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            kind: kind.map(str::to_owned),
            dim: m.rows(),
            matrix,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.matrix.len() != self.dim || self.matrix.iter().any(|r| r.len() != self.dim) {
            return Err(Error::InvalidInput(format!(
                "matrix payload does not match dim {}",
                self.dim
            )));
        }
        Ok(ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            Complex64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        }))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn save_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    write_json(path, &MatrixJson::from_matrix(None, rho.matrix()))
}

pub fn load_density(path: &Path) -> Result<DensityMatrix> {
    let payload: MatrixJson = read_json(path)?;
    if payload.kind.as_deref() == Some("hamiltonian") {
        return Err(Error::InvalidInput(format!(
            "{} holds a hamiltonian, expected a state",
            path.display()
        )));
    }
    DensityMatrix::new(payload.to_matrix()?)
}

pub fn save_hamiltonian(path: &Path, h: &Hamiltonian) -> Result<()> {
    write_json(
        path,
        &MatrixJson::from_matrix(Some("hamiltonian"), h.matrix()),
    )
}

pub fn load_hamiltonian(path: &Path) -> Result<Hamiltonian> {
    let payload: MatrixJson = read_json(path)?;
    Hamiltonian::new(payload.to_matrix()?)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ProbVectorJson {
    pub p: Vec<f64>,
}

pub fn save_prob_vector(path: &Path, p: &ProbVector) -> Result<()> {
    write_json(
        path,
        &ProbVectorJson {
            p: p.entries().to_vec(),
        },
    )
}

pub fn load_prob_vector(path: &Path) -> Result<ProbVector> {
    let payload: ProbVectorJson = read_json(path)?;
    ProbVector::new(payload.p)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct BathJson {
    pub dimension: usize,
    pub beta: f64,
    pub hamiltonian: MatrixJson,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ChannelJson {
    pub system_hamiltonian: MatrixJson,
    pub bath: BathJson,
    pub seed: u64,
    pub energy_conserving: bool,
    pub unitary: Vec<Vec<[f64; 2]>>,
}

pub fn save_channel(path: &Path, h_sys: &Hamiltonian, channel: &QuantumChannel) -> Result<()> {
    let u = MatrixJson::from_matrix(None, channel.global_unitary());
    let payload = ChannelJson {
        system_hamiltonian: MatrixJson::from_matrix(Some("hamiltonian"), h_sys.matrix()),
        bath: BathJson {
            dimension: channel.bath().dimension(),
            beta: channel.bath().beta(),
            hamiltonian: MatrixJson::from_matrix(
                Some("hamiltonian"),
                channel.bath().hamiltonian().matrix(),
            ),
        },
        seed: channel.seed(),
        energy_conserving: channel.is_energy_conserving(),
        unitary: u.matrix,
    };
    write_json(path, &payload)
}

/// Load a channel; unitarity and (for thermal channels) energy
/// conservation are re-validated on the way in.
pub fn load_channel(path: &Path) -> Result<(Hamiltonian, QuantumChannel)> {
    let payload: ChannelJson = read_json(path)?;
    let h_sys = Hamiltonian::new(payload.system_hamiltonian.to_matrix()?)?;
    let h_bath = Hamiltonian::new(payload.bath.hamiltonian.to_matrix()?)?;
    if h_bath.dim() != payload.bath.dimension {
        return Err(Error::InvalidInput("bath dimension mismatch".into()));
    }
    let bath = BathSpec::new(h_bath, payload.bath.beta)?;
    let joint = h_sys.dim() * bath.dimension();
    let u_json = MatrixJson {
        kind: None,
        dim: joint,
        matrix: payload.unitary,
    };
    let u = u_json.to_matrix()?;
    let channel = if payload.energy_conserving {
        QuantumChannel::from_parts(&h_sys, bath, u, payload.seed)?
    } else {
        QuantumChannel::non_thermal_control(h_sys.dim(), bath, u, payload.seed)?
    };
    Ok((h_sys, channel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::gibbs_state;
    use crate::thermalops::sample_thermal_operation;

    #[test]
    fn matrix_round_trip() {
        let h = Hamiltonian::from_energies(&[0.0, 1.0, 2.5]).unwrap();
        let tmp = std::env::temp_dir().join("thermocoh_io_h.json");
        save_hamiltonian(&tmp, &h).unwrap();
        let back = load_hamiltonian(&tmp).unwrap();
        assert!(back.matrix().max_abs_diff(h.matrix()) < 1e-15);

        let tp = gibbs_state(&h, 1.3).unwrap();
        let tmp_s = std::env::temp_dir().join("thermocoh_io_rho.json");
        save_density(&tmp_s, tp.gibbs()).unwrap();
        let rho = load_density(&tmp_s).unwrap();
        assert!(rho.matrix().max_abs_diff(tp.gibbs().matrix()) < 1e-15);

        // A hamiltonian file is rejected as a state.
        assert!(load_density(&tmp).unwrap_err().is_input());
    }

    #[test]
    fn prob_vector_round_trip() {
        let p = ProbVector::new(vec![0.25, 0.5, 0.25]).unwrap();
        let tmp = std::env::temp_dir().join("thermocoh_io_p.json");
        save_prob_vector(&tmp, &p).unwrap();
        assert_eq!(load_prob_vector(&tmp).unwrap(), p);
    }

    #[test]
    fn channel_round_trip() {
        let h = Hamiltonian::from_energies(&[0.0, 1.0]).unwrap();
        let bath = BathSpec::matched_to(&h, 3, 0.9).unwrap();
        let e = sample_thermal_operation(&h, &bath, 17).unwrap();
        let tmp = std::env::temp_dir().join("thermocoh_io_channel.json");
        save_channel(&tmp, &h, &e).unwrap();
        let (h_back, e_back) = load_channel(&tmp).unwrap();
        assert!(h_back.matrix().max_abs_diff(h.matrix()) < 1e-15);
        assert_eq!(e_back.seed(), 17);
        assert!(e_back.global_unitary().max_abs_diff(e.global_unitary()) < 1e-15);
    }

    #[test]
    fn malformed_payload_is_input_error() {
        let tmp = std::env::temp_dir().join("thermocoh_io_bad.json");
        std::fs::write(&tmp, r#"{"dim": 3, "matrix": [[[1,0]]]}"#).unwrap();
        assert!(load_density(&tmp).unwrap_err().is_input());
    }
}
