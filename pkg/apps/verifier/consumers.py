import json
from channels.generic.websocket import AsyncWebsocketConsumer
from channels.db import database_sync_to_async
from django.utils import timezone
from .models import MatrixRun
from .websocket_utils import get_matrix_room_name, validate_websocket_message
import logging

# Set up logging for WebSocket consumers
logger = logging.getLogger('verifier.websocket')


class MatrixProgressConsumer(AsyncWebsocketConsumer):
    """
    Streams the progress of one matrix run: a message per finished cell and one when the
    whole matrix is done.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.matrix_id = None
        self.matrix_room_group_name = None
        self.user = None

    async def connect(self):
        try:
            self.matrix_id = self.scope['url_route']['kwargs']['matrix_id']
            self.user = self.scope.get('user')

            if not self.user or not self.user.is_authenticated:
                logger.warning(f"Unauthenticated user attempted to watch matrix {self.matrix_id}")
                await self.close()
                return

            matrix_status = await self.get_matrix_status()
            if matrix_status is None:
                logger.warning(f"User {self.user.username} asked for unknown matrix {self.matrix_id}")
                await self.close()
                return

            self.matrix_room_group_name = get_matrix_room_name(self.matrix_id)
            await self.channel_layer.group_add(self.matrix_room_group_name, self.channel_name)
            await self.accept()

            await self.send(text_data=json.dumps({
                'type': 'connection_established',
                'matrix_id': self.matrix_id,
                'status': matrix_status,
                'user': self.user.username
            }))

            logger.info(f"User {self.user.username} watching matrix {self.matrix_id}")

        except Exception as e:
            logger.error(f"Error in WebSocket connect: {str(e)}")
            await self.close()

    async def disconnect(self, close_code):
        try:
            if self.matrix_room_group_name:
                await self.channel_layer.group_discard(self.matrix_room_group_name, self.channel_name)
                logger.info(f"User {self.user.username if self.user else 'Unknown'} left matrix {self.matrix_id}")
        except Exception as e:
            logger.error(f"Error in WebSocket disconnect: {str(e)}")

    async def receive(self, text_data):
        try:
            message_data = json.loads(text_data)

            is_valid, error_message = validate_websocket_message(message_data)
            if not is_valid:
                await self.send(text_data=json.dumps({
                    'type': 'error',
                    'message': error_message
                }))
                return

            if message_data['type'] == 'ping':
                await self.send(text_data=json.dumps({
                    'type': 'pong',
                    'timestamp': str(timezone.now())
                }))
            else:
                await self.send(text_data=json.dumps({
                    'type': 'status',
                    'matrix_id': self.matrix_id,
                    'status': await self.get_matrix_status()
                }))

        except json.JSONDecodeError:
            logger.error("Invalid JSON received in WebSocket message")
            await self.send(text_data=json.dumps({
                'type': 'error',
                'message': 'Invalid JSON format'
            }))
        except Exception as e:
            logger.error(f"Error handling WebSocket message: {str(e)}")
            await self.send(text_data=json.dumps({
                'type': 'error',
                'message': 'Internal server error'
            }))

    # Group message handlers
    async def send_notification(self, event):
        try:
            await self.send(text_data=json.dumps({
                'type': 'notification',
                'notification_type': event['notification_type'],
                'data': event['data'],
                'timestamp': str(timezone.now())
            }))
        except Exception as e:
            logger.error(f"Error sending notification: {str(e)}")

    @database_sync_to_async
    def get_matrix_status(self):
        """Status of the watched matrix, or None if it does not exist"""
        return MatrixRun.objects.filter(pk=self.matrix_id).values_list('status', flat=True).first()
