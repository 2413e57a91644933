//! Map-phase artifact: fitted polygons, dissection and topology graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomposition::{decompose, DecompositionError, DissectionMap};
use crate::geometry::{Aabb, Point2};
use crate::map_ingest::{fit_components, IngestConfig, IngestError, OccupancyGrid, SimplePolygon};
use crate::topology::{build_graph, locate, TopologyError, TopologyGraph};

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error("artifact: {0}")]
    Artifact(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapStats {
    pub components: usize,
    pub polygon_vertices: usize,
    pub cells: usize,
    pub cutlines: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdtMap {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub epsilon_fit: f64,
    pub polygons: Vec<SimplePolygon>,
    pub dissection: DissectionMap,
    pub graph: TopologyGraph,
}

impl CdtMap {
    pub fn build(grid: &OccupancyGrid, cfg: &IngestConfig) -> Result<CdtMap, MapError> {
        let fitted = fit_components(grid, cfg)?;
        let polygons: Vec<SimplePolygon> = fitted.into_iter().map(|f| f.polygon).collect();
        Self::from_polygons(grid, cfg.epsilon_fit, polygons)
    }

    pub fn from_polygons(grid: &OccupancyGrid, epsilon_fit: f64, polygons: Vec<SimplePolygon>) -> Result<CdtMap, MapError> {
        let parts = polygons.iter().map(decompose).collect::<Result<Vec<_>, _>>()?;
        let dissection = DissectionMap::combine(parts);
        let graph = build_graph(&dissection);
        Ok(CdtMap {
            width: grid.width,
            height: grid.height,
            resolution: grid.resolution,
            epsilon_fit,
            polygons,
            dissection,
            graph,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<CdtMap, MapError> {
        let m: CdtMap = serde_json::from_str(s).map_err(|e| MapError::Artifact(e.to_string()))?;
        m.dissection.validate()?;
        if m.graph != build_graph(&m.dissection) {
            return Err(MapError::Artifact("graph does not match dissection".into()));
        }
        Ok(m)
    }

    pub fn stats(&self) -> MapStats {
        MapStats {
            components: self.polygons.len(),
            polygon_vertices: self.polygons.iter().map(|p| p.vertices.len()).sum(),
            cells: self.dissection.cells.len(),
            cutlines: self.dissection.cutlines.len(),
        }
    }

    pub fn extent(&self) -> Aabb {
        Aabb {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(self.width as f64 * self.resolution, self.height as f64 * self.resolution),
        }
    }

    pub fn locate(&self, p: Point2) -> Result<usize, TopologyError> {
        locate(&self.dissection, p)
    }
}
