import { ChatApi } from "./api.js";
import { createApp, resolveBaseUrl } from "./app.js";

function required<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

const api = new ChatApi(resolveBaseUrl(window));
createApp(
  {
    turns: required("turns"),
    panel: required("panel"),
    input: required<HTMLInputElement>("input"),
    send: required<HTMLButtonElement>("send"),
    status: required("status"),
  },
  api,
);
