/**
 * Entry point. Configuration comes from query parameters or
 * localStorage: `api` (base URL), `token`, and optionally `net` to open
 * a document immediately.
 */
import { ApiClient } from "./api.js";
import { DesignerApp } from "./app.js";

function setting(name: string, fallback: string): string {
  const params = new URLSearchParams(window.location.search);
  return params.get(name)
    ?? window.localStorage.getItem(`goalnet.${name}`)
    ?? fallback;
}

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) {
  throw new Error("root element #app not found");
}

const api = new ApiClient({
  baseUrl: setting("api", "http://127.0.0.1:8000"),
  token: setting("token", ""),
});
const app = new DesignerApp(root, api);

const netId = setting("net", "");
if (netId) {
  void app.open(netId).catch((error: Error) => {
    app.log(`failed to open net: ${error.message}`);
  });
} else {
  void api.listNets()
    .then((nets) => {
      app.log("nets you can open:");
      for (const net of nets) app.log(`  ${net.id}  ${net.name} [${net.level}]`);
      app.log("add ?net=<id> to the URL to open one");
    })
    .catch((error: Error) => app.log(`cannot list nets: ${error.message}`));
}

declare global {
  interface Window { designer: DesignerApp }
}
window.designer = app;
