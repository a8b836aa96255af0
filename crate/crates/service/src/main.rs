use std::net::{Ipv4Addr, SocketAddr};

use clap::Parser;

#[derive(Parser)]
#[command(name = "latflux-service", version, about = "HTTP service for line diagram drawing")]
struct Args {
    /// Port to listen on.
    #[arg(long, default_value_t = latflux_service::DEFAULT_PORT)]
    port: u16,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, args.port));
    eprintln!("listening on http://{addr}");
    latflux_service::serve(addr).await
}
