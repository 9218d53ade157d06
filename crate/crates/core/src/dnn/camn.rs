//! CAMN: `"CAMN"`, version u32, layer count u32, layer sizes (u64 each),
//! activation tag u8, then f64 parameters layer by layer (weights row-major,
//! then biases). Little-endian throughout.

use alloc::vec::Vec;

use super::{Activation, DenseNet, DnnError};
use crate::bytes::{put_f64, put_u32, put_u64, Reader};

pub const CAMN_MAGIC: &[u8; 4] = b"CAMN";
pub const CAMN_VERSION: u32 = 1;

pub fn encode_model(net: &DenseNet) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + net.layer_sizes().len() * 8 + net.n_params() * 8);
    out.extend_from_slice(CAMN_MAGIC);
    put_u32(&mut out, CAMN_VERSION);
    put_u32(&mut out, net.layer_sizes().len() as u32);
    for &s in net.layer_sizes() {
        put_u64(&mut out, s as u64);
    }
    out.push(net.activation().tag());
    for l in 0..net.n_layers() {
        for &w in net.weights(l).iter().chain(net.biases(l)) {
            put_f64(&mut out, w);
        }
    }
    out
}

pub fn decode_model(buf: &[u8]) -> Result<DenseNet, DnnError> {
    let mut r = Reader::new(buf);
    if r.take(4) != Some(CAMN_MAGIC.as_slice()) {
        return Err(DnnError::BadMagic);
    }
    let version = r.u32().ok_or(DnnError::Truncated("version"))?;
    if version != CAMN_VERSION {
        return Err(DnnError::BadVersion(version));
    }
    let count = r.u32().ok_or(DnnError::Truncated("layer count"))? as usize;
    if count > r.remaining() / 8 {
        return Err(DnnError::Truncated("layer sizes"));
    }
    let sizes: Vec<usize> = (0..count)
        .map(|_| r.u64().map(|v| v as usize).ok_or(DnnError::Truncated("layer sizes")))
        .collect::<Result<_, _>>()?;
    let tag = r.u8().ok_or(DnnError::Truncated("activation tag"))?;
    let activation = Activation::from_tag(tag).ok_or(DnnError::BadActivationTag(tag))?;
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(DnnError::ZeroWidth(sizes));
    }
    let expected = sizes
        .windows(2)
        .try_fold(0usize, |acc, w| w[0].checked_mul(w[1]).and_then(|p| p.checked_add(w[1])).and_then(|p| acc.checked_add(p)));
    if expected.and_then(|e| e.checked_mul(8)) != Some(r.remaining()) {
        return Err(DnnError::Truncated("parameters"));
    }
    let mut read = |len: usize| (0..len).map(|_| r.f64().unwrap_or(f64::NAN)).collect::<Vec<f64>>();
    let mut weights = Vec::with_capacity(sizes.len() - 1);
    let mut biases = Vec::with_capacity(sizes.len() - 1);
    for w in sizes.windows(2) {
        weights.push(read(w[0] * w[1]));
        biases.push(read(w[1]));
    }
    DenseNet::from_parts(sizes, activation, weights, biases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnn::{init_network, TrainConfig};
    use alloc::vec;

    fn net() -> DenseNet {
        let cfg = TrainConfig { neurons: vec![5, 4], activation: Activation::Sigmoid, seed: 12, ..Default::default() };
        init_network(&cfg, 6, 3).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let n = net();
        let bytes = encode_model(&n);
        assert_eq!(&bytes[..4], b"CAMN");
        assert_eq!(bytes.len(), 4 + 4 + 4 + 4 * 8 + 1 + n.n_params() * 8);
        assert_eq!(decode_model(&bytes).unwrap(), n);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = encode_model(&net());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(decode_model(&bad), Err(DnnError::BadMagic));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert_eq!(decode_model(&bad), Err(DnnError::BadVersion(9)));
        assert_eq!(decode_model(&bytes[..bytes.len() - 1]), Err(DnnError::Truncated("parameters")));
        let tag_at = 12 + 4 * 8;
        let mut bad = bytes.clone();
        bad[tag_at] = 7;
        assert_eq!(decode_model(&bad), Err(DnnError::BadActivationTag(7)));
        let mut bad = bytes;
        let last = bad.len() - 8;
        bad[last..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert_eq!(decode_model(&bad), Err(DnnError::NonFinite));
    }
}
