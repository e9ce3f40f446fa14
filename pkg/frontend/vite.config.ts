import { defineConfig } from 'vite';

export default defineConfig({
  server: {
    proxy: { '/runs': 'http://localhost:8000' },
  },
  test: {
    environment: 'jsdom',
  },
});
