/** CLI entry: start the reference backend server. */

import { readFileSync } from "fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { createApp } from "./app";
import { StubConfig } from "./stub";

const argv = yargs(hideBin(process.argv))
  .option("bind", {
    type: "string",
    default: "127.0.0.1:8601",
    describe: "host:port to listen on (port 0 picks a free port)",
  })
  .option("translate-map", {
    type: "string",
    describe: "JSON file mapping source text to translated text",
  })
  .strict()
  .parseSync();

const stub: StubConfig = {};
if (argv["translate-map"]) {
  stub.translateMap = JSON.parse(
    readFileSync(argv["translate-map"], "utf-8"),
  );
}

const [host, portRaw] = argv.bind.includes(":")
  ? [argv.bind.split(":")[0], argv.bind.split(":")[1]]
  : ["127.0.0.1", argv.bind];
const port = Number(portRaw);
if (!Number.isInteger(port)) {
  console.error(`invalid --bind value: ${argv.bind}`);
  process.exit(2);
}

const app = createApp({ stub });
const server = app.listen(port, host, () => {
  const address = server.address();
  const actual = typeof address === "object" && address ? address.port : port;
  // machine-readable ready line; launchers parse it to discover the port
  console.log(JSON.stringify({ listening: `http://${host}:${actual}` }));
});
