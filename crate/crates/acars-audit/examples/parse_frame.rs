//! Parse a raw ACARS frame into its fields and serialize it back.
//!
//!     cargo run --example parse_frame [FRAME]

use acars_audit::parse::{parse_frame, serialize_frame};

fn main() {
    let frame = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "2.HB-JNA5161M42ALX38ZAPOS N46.92 E007.49 FL360".to_string());

    match parse_frame(&frame) {
        Ok(msg) => {
            println!("mode:         {}", msg.mode);
            println!("registration: {}", msg.registration);
            println!("tech ack:     {}", msg.tech_ack);
            println!("label:        {}", msg.label);
            println!("block id:     {:?}", msg.block_id);
            println!("msg no:       {:?}", msg.msg_no);
            println!("flight id:    {:?}", msg.flight_id);
            println!("text:         {:?}", msg.text);
            let round = serialize_frame(&msg).expect("parsed message serializes");
            println!("round trip:   {}", if round == frame { "exact" } else { "differs" });
        }
        Err(e) => {
            eprintln!("parse failed: {e}");
            std::process::exit(1);
        }
    }
}
