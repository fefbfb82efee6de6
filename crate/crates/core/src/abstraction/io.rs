use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use super::{
    AbstractionError, ControlInput, Edge, State5, StateScale, TransitionSystem, VehicleParams,
};
use crate::Real;

const MAGIC: &[u8; 4] = b"VXTS";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    vertices: usize,
    edges: usize,
    step: f64,
    vehicle: VehicleParams<f64>,
    scale: StateScale<f64>,
    eps_end: f64,
    /// Whether a block of per-edge trajectory samples follows the edges.
    samples: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<serde_json::Value>,
}

impl<T: Real> TransitionSystem<T> {
    /// Writes magic, version, a length-prefixed JSON header, then
    /// little-endian blocks: states (5 x f64 each), edges (from, to as u64;
    /// steer, accel, duration, cost as f64) and optionally every edge's
    /// trajectory samples (u64 count, then 5 x f64 per sample).
    pub fn write_to<W: Write>(
        &self,
        mut w: W,
        include_samples: bool,
    ) -> Result<(), AbstractionError> {
        let f = |x: T| x.as_f64();
        let header = Header {
            vertices: self.states.len(),
            edges: self.edges.len(),
            step: f(self.step),
            vehicle: VehicleParams {
                wheelbase: f(self.vehicle.wheelbase),
                max_steer: f(self.vehicle.max_steer),
                max_accel: f(self.vehicle.max_accel),
            },
            scale: StateScale {
                x: f(self.scale.x),
                y: f(self.scale.y),
                theta: f(self.scale.theta),
                v: f(self.scale.v),
                tau: f(self.scale.tau),
            },
            eps_end: f(self.eps_end),
            samples: include_samples,
            config: self.config.clone(),
        };
        let json = serde_json::to_vec(&header)?;
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u64::<LittleEndian>(json.len() as u64)?;
        w.write_all(&json)?;
        let put_state = |w: &mut W, s: &State5<T>| -> std::io::Result<()> {
            for x in s.to_array() {
                w.write_f64::<LittleEndian>(x)?;
            }
            Ok(())
        };
        for s in &self.states {
            put_state(&mut w, s)?;
        }
        for e in &self.edges {
            w.write_u64::<LittleEndian>(e.from as u64)?;
            w.write_u64::<LittleEndian>(e.to as u64)?;
            for x in [e.control.steer, e.control.accel, e.duration, e.cost] {
                w.write_f64::<LittleEndian>(f(x))?;
            }
        }
        if include_samples {
            for i in 0..self.edges.len() {
                let tr = self.trajectory(i)?;
                w.write_u64::<LittleEndian>(tr.samples().len() as u64)?;
                for s in tr.samples() {
                    put_state(&mut w, s)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, AbstractionError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(AbstractionError::Format(
                "not a transition system file".into(),
            ));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != VERSION {
            return Err(AbstractionError::Format(format!(
                "unsupported version {version}"
            )));
        }
        let len = r.read_u64::<LittleEndian>()? as usize;
        let mut json = vec![0u8; len];
        r.read_exact(&mut json)?;
        let h: Header = serde_json::from_slice(&json)?;
        let l = T::lit;
        let get_state = |r: &mut R| -> std::io::Result<State5<T>> {
            let mut a = [0f64; 5];
            r.read_f64_into::<LittleEndian>(&mut a)?;
            Ok(State5::from_array(a))
        };
        let mut states = Vec::with_capacity(h.vertices);
        for _ in 0..h.vertices {
            states.push(get_state(&mut r)?);
        }
        let mut edges = Vec::with_capacity(h.edges);
        for _ in 0..h.edges {
            let from = r.read_u64::<LittleEndian>()? as usize;
            let to = r.read_u64::<LittleEndian>()? as usize;
            let mut v = [0f64; 4];
            r.read_f64_into::<LittleEndian>(&mut v)?;
            edges.push(Edge {
                from,
                to,
                control: ControlInput::new(l(v[0]), l(v[1])),
                duration: l(v[2]),
                cost: l(v[3]),
            });
        }
        if h.samples {
            for _ in 0..h.edges {
                let n = r.read_u64::<LittleEndian>()?;
                for _ in 0..n {
                    get_state(&mut r)?;
                }
            }
        }
        let vehicle = VehicleParams {
            wheelbase: l(h.vehicle.wheelbase),
            max_steer: l(h.vehicle.max_steer),
            max_accel: l(h.vehicle.max_accel),
        };
        let scale = StateScale {
            x: l(h.scale.x),
            y: l(h.scale.y),
            theta: l(h.scale.theta),
            v: l(h.scale.v),
            tau: l(h.scale.tau),
        };
        let mut sys =
            TransitionSystem::new(states, edges, l(h.step), vehicle, scale, l(h.eps_end))?;
        sys.config = h.config;
        Ok(sys)
    }
}
