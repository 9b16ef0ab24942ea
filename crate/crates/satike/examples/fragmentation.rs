//! Fragment an over-MTU message into MTU-safe datagrams and reassemble it.
//!
//!     cargo run --example fragmentation

use satike::codec::{
    check_mtu_safe, fragment, reassemble, ExchangeType, Flags, Message, MessageHeader,
    OverheadModel, Payload, PayloadKind,
};

fn main() {
    // A post-quantum signature blows the AUTH exchange past the MTU.
    let message = Message::new(
        MessageHeader::new([1; 8], [2; 8], ExchangeType::Auth, 1, Flags::INITIATOR),
        vec![Payload::new(PayloadKind::Encrypted, vec![0xAB; 3400])],
    );
    let model = OverheadModel::new(true);
    println!(
        "original: {} bytes, MTU-safe: {}",
        message.encode().unwrap().len(),
        check_mtu_safe(&message, &model)
    );

    let fragments = fragment(&message, &model).unwrap();
    for (i, f) in fragments.iter().enumerate() {
        println!(
            "fragment {}/{}: {} bytes, MTU-safe: {}",
            i + 1,
            fragments.len(),
            f.encode().unwrap().len(),
            check_mtu_safe(f, &model)
        );
    }

    // Reassembly is order-independent.
    let mut shuffled = fragments.clone();
    shuffled.reverse();
    let rebuilt = reassemble(&shuffled).unwrap();
    assert_eq!(rebuilt, message);
    println!("reassembled from reversed order: identical to the original");
}
