//! Dataset ingestion: IDX image/label files and CSV embedding files.
//!
//! IDX is the MNIST container format: a big-endian 32-bit magic, one
//! big-endian 32-bit extent per dimension, then an unsigned-byte payload
//! with no padding. Gzip-compressed files (`1F 8B` prefix) are accepted and
//! decompressed before parsing.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::matrix::Matrix;
use crate::tags::tag_cmp;

/// Magic tag for 1-D unsigned-byte label tensors.
pub const MAGIC_LABELS: u32 = 0x0000_0801;
/// Magic tag for 3-D unsigned-byte image tensors.
pub const MAGIC_IMAGES: u32 = 0x0000_0803;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("unknown IDX magic 0x{0:08x}")]
    UnknownMagic(u32),
    #[error("truncated IDX payload: header declares {expected} bytes, {actual} present")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("{0} trailing bytes after IDX payload")]
    TrailingBytes(usize),
    #[error("IDX dimension {index} has extent 0")]
    ZeroExtent { index: usize },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("wrong IDX magic 0x{actual:08x}, expected 0x{expected:08x}")]
    WrongKind { expected: u32, actual: u32 },
    #[error("CSV row {row} has {actual} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value {token:?} at CSV row {row}, column {column}")]
    NonFiniteValue {
        row: usize,
        column: usize,
        token: String,
    },
    #[error("duplicate item id {0:?}")]
    DuplicateId(String),
    #[error("CSV header must start with `id,label` followed by at least one feature column")]
    BadHeader,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// A raw IDX tensor: magic tag, extents, flat row-major byte payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub magic: u32,
    pub dims: Vec<u32>,
    pub data: Vec<u8>,
}

impl IdxTensor {
    pub fn element_count(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }
}

/// Parse a complete, uncompressed IDX file image.
pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor, DatasetError> {
    let read_u32 = |offset: usize| -> Result<u32, DatasetError> {
        let end = offset + 4;
        if end > bytes.len() {
            return Err(DatasetError::TruncatedPayload {
                expected: end,
                actual: bytes.len(),
            });
        }
        Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
    };

    let magic = read_u32(0)?;
    let n_dims = match magic {
        MAGIC_LABELS => 1,
        MAGIC_IMAGES => 3,
        other => return Err(DatasetError::UnknownMagic(other)),
    };

    let mut dims = Vec::with_capacity(n_dims);
    for i in 0..n_dims {
        let extent = read_u32(4 + 4 * i)?;
        if extent == 0 {
            return Err(DatasetError::ZeroExtent { index: i });
        }
        dims.push(extent);
    }

    let header = 4 + 4 * n_dims;
    let payload: usize = dims.iter().map(|&d| d as usize).product();
    let declared = header + payload;
    if bytes.len() < declared {
        return Err(DatasetError::TruncatedPayload {
            expected: declared,
            actual: bytes.len(),
        });
    }
    if bytes.len() > declared {
        return Err(DatasetError::TrailingBytes(bytes.len() - declared));
    }

    Ok(IdxTensor {
        magic,
        dims,
        data: bytes[header..].to_vec(),
    })
}

/// Inverse of [`parse_idx`]; byte-exact for any valid tensor.
pub fn serialize_idx(tensor: &IdxTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * tensor.dims.len() + tensor.data.len());
    out.extend_from_slice(&tensor.magic.to_be_bytes());
    for &d in &tensor.dims {
        out.extend_from_slice(&d.to_be_bytes());
    }
    out.extend_from_slice(&tensor.data);
    out
}

/// Parse an IDX file image, gunzipping first when the `1F 8B` prefix is
/// present.
pub fn decode_idx(bytes: &[u8]) -> Result<IdxTensor, DatasetError> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut decoded = Vec::new();
        flate2::read::GzDecoder::new(bytes).read_to_end(&mut decoded)?;
        parse_idx(&decoded)
    } else {
        parse_idx(bytes)
    }
}

fn read_with_context(path: &Path) -> Result<Vec<u8>, DatasetError> {
    fs::read(path).map_err(|e| {
        DatasetError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxTensor, DatasetError> {
    decode_idx(&read_with_context(path.as_ref())?)
}

/// A labeled vector dataset: `n` rows of `d` reals with stable string ids.
#[derive(Debug, Clone)]
pub struct VectorDataset {
    pub ids: Vec<String>,
    pub vectors: Matrix,
    pub labels: Vec<String>,
    pub source_note: String,
}

impl VectorDataset {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.n_cols()
    }
}

impl fmt::Display for VectorDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} items x {} dims ({})",
            self.len(),
            self.dim(),
            self.source_note
        )
    }
}

/// Flatten raw image bytes into row vectors and attach labels.
///
/// Each `h x w` image becomes a `d = h*w` real vector of the raw byte values
/// (0-255), row-major; ids are `"0".."n-1"` in file order.
pub fn vectorize_images(
    images: &IdxTensor,
    labels: &IdxTensor,
) -> Result<VectorDataset, DatasetError> {
    if images.magic != MAGIC_IMAGES {
        return Err(DatasetError::WrongKind {
            expected: MAGIC_IMAGES,
            actual: images.magic,
        });
    }
    if labels.magic != MAGIC_LABELS {
        return Err(DatasetError::WrongKind {
            expected: MAGIC_LABELS,
            actual: labels.magic,
        });
    }
    let n = images.dims[0] as usize;
    let n_labels = labels.dims[0] as usize;
    if n != n_labels {
        return Err(DatasetError::CountMismatch {
            images: n,
            labels: n_labels,
        });
    }
    let d = (images.dims[1] as usize) * (images.dims[2] as usize);

    let data: Vec<f64> = images.data.iter().map(|&b| f64::from(b)).collect();
    let ids = (0..n).map(|i| i.to_string()).collect();
    let tags = labels.data.iter().map(|&b| b.to_string()).collect();

    Ok(VectorDataset {
        ids,
        vectors: Matrix::from_vec(n, d, data),
        labels: tags,
        source_note: format!("idx images n={n} {}x{}", images.dims[1], images.dims[2]),
    })
}

/// Load both halves of an IDX image/label pair and vectorize.
pub fn load_idx_pair(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<VectorDataset, DatasetError> {
    let images = load_idx(images_path)?;
    let labels = load_idx(labels_path)?;
    vectorize_images(&images, &labels)
}

/// Parse a CSV embedding file with header `id,label,x0,...,x{d-1}`.
pub fn read_csv_vectors<R: Read>(reader: R, source_note: &str) -> Result<VectorDataset, DatasetError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "id" || &headers[1] != "label" {
        return Err(DatasetError::BadHeader);
    }
    let d = headers.len() - 2;

    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut data = Vec::new();
    let mut seen = HashSet::new();

    for (row_idx, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row = row_idx + 2; // 1-based, counting the header line
        if record.len() != d + 2 {
            return Err(DatasetError::RaggedRow {
                row,
                expected: d + 2,
                actual: record.len(),
            });
        }
        let id = record[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(DatasetError::DuplicateId(id));
        }
        ids.push(id);
        labels.push(record[1].to_string());
        for (col, token) in record.iter().skip(2).enumerate() {
            let value: f64 = token
                .trim()
                .parse()
                .unwrap_or(f64::NAN);
            if !value.is_finite() {
                return Err(DatasetError::NonFiniteValue {
                    row,
                    column: col + 3,
                    token: token.to_string(),
                });
            }
            data.push(value);
        }
    }

    let n = ids.len();
    Ok(VectorDataset {
        ids,
        vectors: Matrix::from_vec(n, d, data),
        labels,
        source_note: source_note.to_string(),
    })
}

pub fn load_csv_vectors(path: impl AsRef<Path>) -> Result<VectorDataset, DatasetError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| {
        DatasetError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    read_csv_vectors(file, &path.display().to_string())
}

/// The rows of one class, in dataset order.
#[derive(Debug, Clone)]
pub struct ClassView {
    pub class_tag: String,
    pub row_indices: Vec<usize>,
}

/// Partition the dataset into per-class views, ordered by class tag.
pub fn group_by_class(ds: &VectorDataset) -> Vec<ClassView> {
    let mut tags: Vec<&String> = ds.labels.iter().collect();
    tags.sort_by(|a, b| tag_cmp(a, b));
    tags.dedup();

    let mut views: Vec<ClassView> = tags
        .into_iter()
        .map(|t| ClassView {
            class_tag: t.clone(),
            row_indices: Vec::new(),
        })
        .collect();

    for (i, label) in ds.labels.iter().enumerate() {
        let slot = views
            .binary_search_by(|v| tag_cmp(&v.class_tag, label))
            .expect("every label has a view");
        views[slot].row_indices.push(i);
    }
    views
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_labels() -> Vec<u8> {
        // magic 0x801 | dims [2] | data [5, 0]
        vec![0, 0, 8, 1, 0, 0, 0, 2, 5, 0]
    }

    fn minimal_images() -> Vec<u8> {
        // magic 0x803 | dims [1, 2, 2] | data [0, 255, 128, 64]
        vec![
            0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0x00, 0xFF, 0x80, 0x40,
        ]
    }

    #[test]
    fn parses_minimal_label_file() {
        let t = parse_idx(&minimal_labels()).unwrap();
        assert_eq!(t.magic, MAGIC_LABELS);
        assert_eq!(t.dims, vec![2]);
        assert_eq!(t.data, vec![5, 0]);
    }

    #[test]
    fn parses_minimal_image_file() {
        let t = parse_idx(&minimal_images()).unwrap();
        assert_eq!(t.magic, MAGIC_IMAGES);
        assert_eq!(t.dims, vec![1, 2, 2]);
        assert_eq!(t.data, vec![0, 255, 128, 64]);
    }

    #[test]
    fn rejects_unknown_magic() {
        let bytes = vec![0, 0, 7, 1, 0, 0, 0, 1, 9];
        assert!(matches!(
            parse_idx(&bytes),
            Err(DatasetError::UnknownMagic(0x0701))
        ));
    }

    #[test]
    fn rejects_truncation_and_trailing() {
        let mut bytes = minimal_labels();
        bytes.pop();
        assert!(matches!(
            parse_idx(&bytes),
            Err(DatasetError::TruncatedPayload { .. })
        ));

        let mut bytes = minimal_labels();
        bytes.push(7);
        assert!(matches!(
            parse_idx(&bytes),
            Err(DatasetError::TrailingBytes(1))
        ));
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let t = parse_idx(&minimal_images()).unwrap();
        assert_eq!(serialize_idx(&t), minimal_images());
        assert_eq!(parse_idx(&serialize_idx(&t)).unwrap(), t);
    }

    #[test]
    fn decode_accepts_gzip() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(&minimal_labels()).unwrap();
        let gz = enc.finish().unwrap();
        let t = decode_idx(&gz).unwrap();
        assert_eq!(t.data, vec![5, 0]);
    }

    #[test]
    fn vectorizes_single_image() {
        let images = parse_idx(&minimal_images()).unwrap();
        let labels = IdxTensor {
            magic: MAGIC_LABELS,
            dims: vec![1],
            data: vec![7],
        };
        let ds = vectorize_images(&images, &labels).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.dim(), 4);
        assert_eq!(ds.vectors.row(0), &[0.0, 255.0, 128.0, 64.0]);
        assert_eq!(ds.labels, vec!["7"]);
        assert_eq!(ds.ids, vec!["0"]);
    }

    #[test]
    fn vectorize_pixel_sum_is_preserved() {
        let images = parse_idx(&minimal_images()).unwrap();
        let labels = IdxTensor {
            magic: MAGIC_LABELS,
            dims: vec![1],
            data: vec![3],
        };
        let ds = vectorize_images(&images, &labels).unwrap();
        let dataset_sum: f64 = ds.vectors.data().iter().sum();
        let byte_sum: f64 = images.data.iter().map(|&b| f64::from(b)).sum();
        assert_eq!(dataset_sum, byte_sum);
    }

    #[test]
    fn vectorize_rejects_count_mismatch() {
        let mut images = parse_idx(&minimal_images()).unwrap();
        images.dims[0] = 2;
        images.data.extend_from_slice(&[1, 2, 3, 4]);
        let labels = IdxTensor {
            magic: MAGIC_LABELS,
            dims: vec![3],
            data: vec![1, 2, 3],
        };
        assert!(matches!(
            vectorize_images(&images, &labels),
            Err(DatasetError::CountMismatch {
                images: 2,
                labels: 3
            })
        ));
    }

    #[test]
    fn csv_well_formed() {
        let csv = "id,label,x0,x1,x2\na,pos,1.0,2.0,3.0\nb,neg,4.0,5.0,6.0\n";
        let ds = read_csv_vectors(csv.as_bytes(), "test").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.vectors.row(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn csv_rejects_nan() {
        let csv = "id,label,x0\na,p,nan\n";
        assert!(matches!(
            read_csv_vectors(csv.as_bytes(), "test"),
            Err(DatasetError::NonFiniteValue { row: 2, .. })
        ));
    }

    #[test]
    fn csv_rejects_duplicate_id() {
        let csv = "id,label,x0\na,p,1\na,p,2\n";
        assert!(matches!(
            read_csv_vectors(csv.as_bytes(), "test"),
            Err(DatasetError::DuplicateId(id)) if id == "a"
        ));
    }

    #[test]
    fn csv_rejects_ragged_row() {
        let csv = "id,label,x0,x1\na,p,1,2\nb,q,3\n";
        assert!(matches!(
            read_csv_vectors(csv.as_bytes(), "test"),
            Err(DatasetError::RaggedRow { row: 3, .. })
        ));
    }

    #[test]
    fn groups_by_class_in_tag_order() {
        let ds = VectorDataset {
            ids: vec!["0".into(), "1".into(), "2".into()],
            vectors: Matrix::zeros(3, 1),
            labels: vec!["1".into(), "0".into(), "1".into()],
            source_note: String::new(),
        };
        let views = group_by_class(&ds);
        assert_eq!(views.len(), 2);
        assert_eq!(views[0].class_tag, "0");
        assert_eq!(views[0].row_indices, vec![1]);
        assert_eq!(views[1].class_tag, "1");
        assert_eq!(views[1].row_indices, vec![0, 2]);
    }

    #[test]
    fn single_class_groups_everything() {
        let ds = VectorDataset {
            ids: vec!["a".into(), "b".into()],
            vectors: Matrix::zeros(2, 1),
            labels: vec!["x".into(), "x".into()],
            source_note: String::new(),
        };
        let views = group_by_class(&ds);
        assert_eq!(views.len(), 1);
        assert_eq!(views[0].row_indices, vec![0, 1]);
    }

    #[test]
    fn class_views_partition_the_rows() {
        let mut rng = crate::rng::SplitMix64::new(0xC1A55);
        for n in [1usize, 2, 17, 100] {
            let labels: Vec<String> = (0..n).map(|_| rng.below(5).to_string()).collect();
            let ds = VectorDataset {
                ids: (0..n).map(|i| i.to_string()).collect(),
                vectors: Matrix::zeros(n, 1),
                labels,
                source_note: String::new(),
            };
            let mut concatenated: Vec<usize> = group_by_class(&ds)
                .into_iter()
                .flat_map(|v| {
                    assert!(v.row_indices.windows(2).all(|w| w[0] < w[1]));
                    v.row_indices
                })
                .collect();
            concatenated.sort_unstable();
            assert_eq!(concatenated, (0..n).collect::<Vec<_>>());
        }
    }
}
