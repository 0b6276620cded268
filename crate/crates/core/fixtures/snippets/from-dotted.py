from raven.contrib.flask import Sentry
